// Acceptance suite: runs every acceptance criterion and prints one pass/fail
// line per criterion. All arithmetic is exact, so every comparison below is
// an equality check; runtimes are wall-clock guards.

#include <chrono>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "toproots/corpus.hpp"
#include "toproots/multiplier_jumping.hpp"
#include "toproots/report.hpp"
#include "toproots/zeta_poles.hpp"

using namespace toproots;

namespace {

int failures = 0;

void report(int idx, const std::string& what, bool pass, const std::string& detail = "") {
  std::cout << "criterion " << idx << ": " << (pass ? "PASS" : "FAIL") << " - " << what;
  if (!pass && !detail.empty()) std::cout << " [" << detail << "]";
  std::cout << "\n";
  if (!pass) ++failures;
}

std::set<Rat> root_values(const RootMultiset& m) {
  std::set<Rat> out;
  for (const auto& e : m.entries) out.insert(e.root);
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// --- criterion 1: the s-family invariants -----------------------------------

bool criterion1(std::string& why) {
  for (Int s = 3; s <= 6; ++s) {
    auto branch = make_char_sequence(4, {6, 2 * s + 1});
    auto sg = pairs_to_semigroup(chars_to_pairs(branch));
    if (sg.generators != std::vector<Int>{4, 6, 2 * s + 7}) {
      why = "semigroup mismatch at s=" + std::to_string(s);
      return false;
    }
    auto g = build_from_branch({branch, 1});
    if (g.n_vertices() != s + 2) {
      why = "vertex count at s=" + std::to_string(s);
      return false;
    }
    // N = (4, 6, 12, 14, ..., 2s+6, 2s+7, 4s+14); k = (2, 3, 5, 6, ..., s+3, 2s+5).
    std::vector<Int> expect_N{4, 6, 12};
    for (Int j = 1; j <= s - 3; ++j) expect_N.push_back(12 + 2 * j);
    expect_N.push_back(2 * s + 7);
    expect_N.push_back(4 * s + 14);
    std::vector<Int> expect_k{2, 3, 5};
    for (Int j = 1; j <= s - 2; ++j) expect_k.push_back(5 + j);
    expect_k.push_back(2 * s + 5);
    for (Int v = 0; v < g.n_vertices(); ++v) {
      if (g.verts[static_cast<size_t>(v)].N != expect_N[static_cast<size_t>(v)] ||
          g.verts[static_cast<size_t>(v)].k != expect_k[static_cast<size_t>(v)]) {
        why = "numerical data at s=" + std::to_string(s) + ", E_" + std::to_string(v);
        return false;
      }
    }
    std::set<Int> rupture;
    auto cls = classify_vertices(g);
    for (Int v = 0; v < g.n_vertices(); ++v)
      if (cls[static_cast<size_t>(v)].rupture) rupture.insert(v);
    if (rupture != std::set<Int>{2, s + 1}) {
      why = "rupture set at s=" + std::to_string(s);
      return false;
    }
    auto rr = topological_roots(g);
    std::set<Rat> from_e2, from_top;
    for (const auto& e : rr.entries)
      for (const auto& src : e.sources) {
        if (src.divisor == 2) from_e2.insert(e.root);
        if (src.divisor == s + 1) from_top.insert(e.root);
      }
    if (from_e2 != std::set<Rat>{Rat(-5, 12), Rat(-7, 12), Rat(-11, 12), Rat(-13, 12)}) {
      why = "E_2 roots at s=" + std::to_string(s);
      return false;
    }
    if (static_cast<Int>(from_top.size()) != 2 * s + 6) {
      why = "E_{s+1} root count at s=" + std::to_string(s) + " (" +
            std::to_string(from_top.size()) + ")";
      return false;
    }
    if (rr.find(Rat(-1)) == nullptr) {
      why = "-1 missing at s=" + std::to_string(s);
      return false;
    }
  }
  return true;
}

// --- criterion 2: the s-family zeta poles and jumping numbers ---------------

bool criterion2(std::string& why) {
  for (Int s = 3; s <= 6; ++s) {
    auto g = build_from_branch({make_char_sequence(4, {6, 2 * s + 1}), 1});
    std::set<std::pair<Rat, Int>> poles;
    for (auto& [loc, order] : zeta_poles_exact(g)) poles.insert({loc, order});
    std::set<std::pair<Rat, Int>> expect{
        {Rat(-5, 12), 1}, {Rat(-(2 * s + 5), 4 * s + 14), 1}, {Rat(-1), 1}};
    if (poles != expect) {
      why = "zeta poles at s=" + std::to_string(s);
      return false;
    }
    auto jn = jumping_numbers(g);
    if (static_cast<Int>(jn.size()) != s + 5) {
      why = "jumping count at s=" + std::to_string(s);
      return false;
    }
    std::set<Rat> values;
    for (const auto& j : jn) values.insert(j.value);
    for (const Rat& need :
         {Rat(5, 12), Rat(11, 12), Rat(2 * s + 9, 4 * s + 14)})
      if (!values.count(need)) {
        why = "jumping numbers at s=" + std::to_string(s) + " miss " + need.str();
        return false;
      }
  }
  return true;
}

// --- criterion 3: quasi-homogeneous closed set ------------------------------

bool criterion3(std::string& why) {
  for (auto [n, m] : std::vector<std::pair<Int, Int>>{{2, 3}, {2, 5}, {3, 4}, {3, 5}, {4, 5}}) {
    auto g = build_from_branch({make_char_sequence(n, {m}), 1});
    auto got = root_values(topological_roots(g));
    // Independent enumeration of S_top union {-1}.
    std::set<Rat> expect{Rat(-1)};
    for (Int i = 0; n * i < n * m + n + m; ++i)
      for (Int j = 0; n * i + m * j < n * m + n + m; ++j) {
        Rat sig(-(n * i + m * j), n * m);
        if ((Rat(n) * sig).is_integer()) continue;
        if ((Rat(m) * sig).is_integer()) continue;
        expect.insert(sig);
      }
    if (got != expect) {
      why = "S_top mismatch at (" + std::to_string(n) + "," + std::to_string(m) + ")";
      return false;
    }
    for (const auto& e : topological_roots(g).entries)
      if (e.multiplicity != 1) {
        why = "multiplicity above 1 at (" + std::to_string(n) + "," + std::to_string(m) + ")";
        return false;
      }
  }
  return true;
}

// --- criterion 4: oracle equivalence on 200 random branches -----------------

bool criterion4(std::string& why) {
  Timer timer;
  CorpusOptions opt;
  opt.max_entry = 12;
  opt.max_den = 12;
  auto branches = test_corpus_branches(200, 20260810, opt);
  for (size_t i = 0; i < branches.size(); ++i) {
    BranchSpec reduced{branches[i].invariants, 1};
    auto g = build_from_branch(reduced);
    auto lhs = topological_roots(g);
    auto rhs = roots_irreducible_closed_form(chars_to_pairs(branches[i].invariants));
    if (lhs.entries.size() != rhs.entries.size()) {
      why = "root count mismatch on branch " + std::to_string(i);
      return false;
    }
    for (size_t e = 0; e < lhs.entries.size(); ++e)
      if (lhs.entries[e].root != rhs.entries[e].root ||
          lhs.entries[e].multiplicity != rhs.entries[e].multiplicity) {
        why = "root mismatch on branch " + std::to_string(i) + " at " +
              lhs.entries[e].root.str();
        return false;
      }
  }
  double secs = timer.seconds();
  if (secs >= 60.0) {
    why = "took " + std::to_string(secs) + " s (budget 60 s)";
    return false;
  }
  std::cout << "  (criterion 4 corpus: 200 branches in " << secs << " s)\n";
  return true;
}

// --- criterion 5: containment audit on 100 random curves --------------------

bool criterion5(std::string& why) {
  std::mt19937 rng(271828);
  for (Int i = 0; i < 100; ++i) {
    CurveSpec spec = random_curve(rng);
    auto g = build_from_curve(spec);
    auto roots = topological_roots(g);
    auto jrep = check_jumping_containment(g, roots);
    auto zrep = check_zeta_containment(g, roots);
    if (!jrep.pass || !zrep.pass) {
      why = "containment failure on curve " + std::to_string(i);
      return false;
    }
  }
  return true;
}

// --- criterion 6: invariant suites over random corpora ----------------------

bool criterion6(std::string& why) {
  std::mt19937 rng(1618033);
  auto curves = test_corpus_curves(40, 57721);
  for (size_t ci = 0; ci < curves.size(); ++ci) {
    DualGraph g;
    try {
      g = build_from_curve(curves[ci]);  // two-path N/k agreement and the
                                         // graph invariants are asserted here
    } catch (const std::exception& e) {
      why = "graph invariants on curve " + std::to_string(ci) + ": " + e.what();
      return false;
    }
    auto val = validate_graph(g);
    if (!val.ok()) {
      why = "validation report on curve " + std::to_string(ci);
      return false;
    }
    // Residue identities and the normalized bound pattern over random forms.
    for (int iter = 0; iter < 3; ++iter) {
      FormExponent w = FormExponent::zero(g);
      for (auto& e : w.exponents) e = static_cast<Int>(rng() % 4);
      for (Int v = 0; v < g.n_vertices(); ++v) {
        try {
          auto A = residues(g, w, v);  // sum identity asserted inside
          auto B = residues_closed_form(g, w, v);
          if (A.eps != B.eps) {
            why = "residue two-path mismatch on curve " + std::to_string(ci);
            return false;
          }
          normalize_residues(g, w, v);  // bound pattern asserted inside
        } catch (const std::exception& e) {
          why = "residue/normalization failure on curve " + std::to_string(ci) + " at E_" +
                std::to_string(v) + ": " + e.what();
          return false;
        }
      }
    }
    // Unloading idempotence and antinefness.
    for (int iter = 0; iter < 3; ++iter) {
      ExceptionalDivisor D(static_cast<size_t>(g.n_vertices()));
      for (auto& d : D) d = static_cast<Int>(rng() % 5);
      auto closed = antinef_closure(g, D);
      if (antinef_closure(g, closed) != closed) {
        why = "unloading not idempotent on curve " + std::to_string(ci);
        return false;
      }
      for (Int v = 0; v < g.n_vertices(); ++v)
        if (divisor_product(g, closed, {}, v) > 0) {
          why = "unloading output not antinef on curve " + std::to_string(ci);
          return false;
        }
    }
    // Zeta two-path agreement (asserted inside pole_classification).
    try {
      pole_classification(g);
    } catch (const std::exception& e) {
      why = "zeta two-path mismatch on curve " + std::to_string(ci) + ": " + e.what();
      return false;
    }
  }
  return true;
}

// --- criterion 7: cusp end-to-end fixture -----------------------------------

bool criterion7(std::string& why) {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  auto roots = topological_roots(g);
  std::set<std::pair<Rat, Int>> got;
  for (const auto& e : roots.entries) got.insert({e.root, e.multiplicity});
  if (got != std::set<std::pair<Rat, Int>>{{Rat(-5, 6), 1}, {Rat(-7, 6), 1}, {Rat(-1), 1}}) {
    why = "root set";
    return false;
  }
  auto jn = jumping_numbers(g);
  if (jn.size() != 1 || jn[0].value != Rat(5, 6)) {
    why = "jumping set";
    return false;
  }
  std::set<std::pair<Rat, Int>> poles;
  for (auto& [loc, order] : zeta_poles_exact(g)) poles.insert({loc, order});
  if (poles != std::set<std::pair<Rat, Int>>{{Rat(-5, 6), 1}, {Rat(-1), 1}}) {
    why = "zeta poles";
    return false;
  }
  auto audit = run_audit(g);
  if (!audit.pass) {
    why = "containment audit";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  std::string why;

  why.clear();
  report(1, "family s=3..6: semigroup, N and k data, rupture set, E_2 roots, root counts",
         criterion1(why), why);
  why.clear();
  report(2, "family s=3..6: zeta poles and jumping numbers", criterion2(why), why);
  why.clear();
  report(3, "quasi-homogeneous (n,m): closed root set against independent enumeration",
         criterion3(why), why);
  why.clear();
  report(4, "oracle equivalence on 200 random irreducible branches (< 60 s)", criterion4(why),
         why);
  why.clear();
  report(5, "containment audit on 100 random curves", criterion5(why), why);
  why.clear();
  report(6, "invariant suites over the random corpora", criterion6(why), why);
  why.clear();
  report(7, "cusp end-to-end fixture", criterion7(why), why);

  if (failures == 0) {
    std::cout << "acceptance: all criteria PASS\n";
    return 0;
  }
  std::cout << "acceptance: " << failures << " criteria FAILED\n";
  return 1;
}
