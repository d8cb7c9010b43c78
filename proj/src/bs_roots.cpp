#include "toproots/bs_roots.hpp"

#include <algorithm>
#include <map>

namespace toproots {

const char* criterion_name(RootCriterion c) {
  switch (c) {
    case RootCriterion::EpsZero:
      return "eps-zero";
    case RootCriterion::ThreeNonIntegers:
      return "three-nonintegers";
    case RootCriterion::NonExceptional:
      return "non-exceptional";
    case RootCriterion::NonExceptionalLctDouble:
      return "non-exceptional-lct-double";
    case RootCriterion::ClosedForm:
      return "closed-form";
    case RootCriterion::Silent:
      return "none";
  }
  return "none";
}

namespace {

// Representation of v over the site values at `vertex` via subset-sum DP;
// used to seed witnesses.
std::optional<FormExponent> greedy_site_representation(const DualGraph& g, Int vertex, Int v) {
  std::vector<std::pair<Int, size_t>> vals;
  for (size_t s = 0; s < g.sites.size(); ++s) {
    Int val = g.site_val[s][static_cast<size_t>(vertex)];
    if (val > 0) vals.emplace_back(val, s);
  }
  std::sort(vals.rbegin(), vals.rend());
  std::vector<Int> from(static_cast<size_t>(v) + 1, -1);
  std::vector<char> reach(static_cast<size_t>(v) + 1, 0);
  reach[0] = 1;
  for (size_t idx = 0; idx < vals.size(); ++idx) {
    Int val = vals[idx].first;
    for (Int x = val; x <= v; ++x)
      if (!reach[static_cast<size_t>(x)] && reach[static_cast<size_t>(x - val)]) {
        reach[static_cast<size_t>(x)] = 1;
        from[static_cast<size_t>(x)] = static_cast<Int>(idx);
      }
  }
  if (!reach[static_cast<size_t>(v)]) return std::nullopt;
  FormExponent w = FormExponent::zero(g);
  Int x = v;
  while (x > 0) {
    Int idx = from[static_cast<size_t>(x)];
    require_internal(idx >= 0, "site representation trace failed");
    w.exponents[vals[static_cast<size_t>(idx)].second] += 1;
    x -= vals[static_cast<size_t>(idx)].first;
  }
  require_internal(form_valuation(g, w, vertex) == v, "site representation misses its value");
  return w;
}

RootClassification classify_from_eps(const std::vector<Rat>& eps, const Rat& sig) {
  RootClassification out;
  out.sigma_value = sig;
  out.eps = eps;
  Int zeros = 0, nonint = 0;
  for (const Rat& e : eps) {
    if (e == Rat(0)) ++zeros;
    if (!e.is_integer()) ++nonint;
  }
  if (zeros > 0) {
    out.multiplicity = 2;
    out.criterion = RootCriterion::EpsZero;
  } else if (nonint >= 3) {
    out.multiplicity = 1;
    out.criterion = RootCriterion::ThreeNonIntegers;
  } else {
    out.multiplicity = 0;
    out.criterion = RootCriterion::Silent;
  }
  return out;
}

}  // namespace

std::vector<Int> attainable_values(const DualGraph& g, Int rupture_vertex) {
  require_input(g.is_rupture(rupture_vertex), "NotRupture");
  Int N = g.verts[static_cast<size_t>(rupture_vertex)].N;
  std::vector<char> reach(static_cast<size_t>(N), 0);
  reach[0] = 1;
  for (size_t s = 0; s < g.sites.size(); ++s) {
    Int val = g.site_val[s][static_cast<size_t>(rupture_vertex)];
    if (val <= 0) continue;
    for (Int x = val; x < N; ++x)
      if (reach[static_cast<size_t>(x - val)]) reach[static_cast<size_t>(x)] = 1;
  }
  std::vector<Int> out;
  for (Int x = 0; x < N; ++x)
    if (reach[static_cast<size_t>(x)]) out.push_back(x);
  return out;
}

namespace {

// Witness-free root classification from the fractional classes; exactly what
// the witness route computes, by the form-independence of the vanishing and
// integrality patterns. The per-vertex data (slot betas, curvette-power
// flag, modular inverses) is hoisted out of the per-value loop.
struct VertexClassifier {
  const DualGraph& g;
  Int vertex;
  Int N, k, n_g, m_bar_g, offset;
  Int inv_mbar_mod_n, inv_n_mod_mbar;
  bool curvette_power;
  std::vector<Int> betas;          // per slot; 0 for zero slots
  std::vector<char> zero_possible; // side condition per slot

  VertexClassifier(const DualGraph& gg, Int vv) : g(gg), vertex(vv) {
    const auto& vd = g.verts[static_cast<size_t>(vertex)];
    const auto& pr = g.profile[static_cast<size_t>(vertex)];
    N = vd.N;
    k = vd.k;
    n_g = pr.n_g;
    m_bar_g = pr.m_bar_g;
    require_internal((k - m_bar_g) % n_g == 0, "slot-2 offset not integral");
    offset = (k - m_bar_g) / n_g;
    inv_mbar_mod_n = mod_inverse(m_bar_g, n_g);
    inv_n_mod_mbar = mod_inverse(n_g, m_bar_g);
    curvette_power = curvette_power_case(g, vertex);
    for (Int j = 0; j < static_cast<Int>(vd.slots.size()); ++j) {
      bool zero_side = true;
      const SlotRef& s = vd.slots[static_cast<size_t>(j)];
      Int beta = 0;
      if (!s.is_zero()) {
        // slot_beta, inlined through zero_achievable's contract
        beta = [&]() {
          switch (s.kind) {
            case SlotRef::Arrow:
              return g.arrows[static_cast<size_t>(s.id)].N;
            case SlotRef::Vertex: {
              Int farprod = g.far_decoration_product(s.id, vertex);
              if (j == 0)
                return checked_sub(checked_mul(n_g, g.verts[static_cast<size_t>(s.id)].N),
                                   checked_mul(farprod, N));
              if (j == 1)
                return checked_sub(checked_mul(m_bar_g, g.verts[static_cast<size_t>(s.id)].N),
                                   checked_mul(farprod, N));
              return checked_sub(g.verts[static_cast<size_t>(s.id)].N, checked_mul(farprod, N));
            }
            default:
              return Int(0);
          }
        }();
      }
      if (s.is_zero() || beta == 0) zero_side = false;
      if (j >= 2 && curvette_power) zero_side = false;
      betas.push_back(beta);
      zero_possible.push_back(zero_side);
    }
  }

  // Pure modular arithmetic per value; the Rat forms of the same tests are
  // exercised through zero_achievable / residue_integral_class in the
  // sampled witness cross-checks.
  RootClassification classify(Int v) const {
    RootClassification out;
    out.sigma_value = Rat(-(k + v), N);
    Int zeros = 0, nonint = 0;
    const auto& vd = g.verts[static_cast<size_t>(vertex)];
    Int kv = k + v;
    for (size_t j = 0; j < vd.slots.size(); ++j) {
      if (vd.slots[j].is_zero()) continue;  // eps = 1, integral, nonzero
      bool integral;
      Int beta = betas[j];
      if (j >= 2) {
        // beta sigma integral iff beta (k+v) = 0 mod N; the zero needs
        // beta sigma <= -1, i.e. beta (k+v) >= N.
        Int prod = checked_mul(beta, kv);
        integral = prod % N == 0;
        if (integral && zero_possible[j] && prod >= N) ++zeros;
      } else if (j == 0) {
        Int a1 = (v % n_g) * inv_mbar_mod_n % n_g;
        // ((a1+1) - beta (k+v)/N) / n_g integral iff
        // N (a1+1) - beta (k+v) = 0 mod n_g N.
        Int t = checked_sub(checked_mul(N, a1 + 1), checked_mul(beta, kv));
        Int m = checked_mul(n_g, N);
        integral = ((t % m) + m) % m == 0;
        if (integral && zero_possible[j]) ++zeros;
      } else {
        Int a2 = (v % m_bar_g) * inv_n_mod_mbar % m_bar_g;
        Int t = checked_sub(checked_mul(N, checked_add(a2, offset)), checked_mul(beta, kv));
        Int m = checked_mul(m_bar_g, N);
        integral = ((t % m) + m) % m == 0;
        if (integral && zero_possible[j]) ++zeros;
      }
      if (!integral) ++nonint;
    }
    if (zeros > 0) {
      out.multiplicity = 2;
      out.criterion = RootCriterion::EpsZero;
    } else if (nonint >= 3) {
      out.multiplicity = 1;
      out.criterion = RootCriterion::ThreeNonIntegers;
    } else {
      out.multiplicity = 0;
      out.criterion = RootCriterion::Silent;
    }
    return out;
  }
};

RootClassification classify_root_fast(const DualGraph& g, Int rupture_vertex, Int v) {
  return VertexClassifier(g, rupture_vertex).classify(v);
}

}  // namespace

RootClassification classify_root(const DualGraph& g, Int rupture_vertex, Int v) {
  require_input(g.is_rupture(rupture_vertex), "NotRupture");
  const auto& vd = g.verts[static_cast<size_t>(rupture_vertex)];
  require_input(v >= 0 && v < vd.N, "NotAttainable");

  auto rep = greedy_site_representation(g, rupture_vertex, v);
  require_input(rep.has_value(), "NotAttainable");
  FormExponent w1 = normalize_residues(g, *rep, rupture_vertex);
  auto R1 = residues(g, w1, rupture_vertex);
  auto out = classify_from_eps(R1.eps, R1.sigma_value);

  // The classification is independent of the witness; the vanishing and
  // integrality patterns of the normalized form must match the closed-form
  // decisions.
  for (size_t j = 0; j < vd.slots.size(); ++j) {
    bool za = zero_achievable(g, rupture_vertex, v, static_cast<Int>(j));
    require_internal(za == (R1.eps[j] == Rat(0)),
                     "zero_achievable disagrees with the normalized witness");
    require_internal(residue_integral_class(g, rupture_vertex, v, static_cast<Int>(j)) ==
                         R1.eps[j].is_integer(),
                     "integrality class disagrees with the normalized witness");
  }
  require_internal(classify_root_fast(g, rupture_vertex, v).multiplicity == out.multiplicity,
                   "fast classification disagrees with the witness route");
  return out;
}

RootMultiset roots_irreducible_closed_form(const PuiseuxPairs& p) {
  CharSequence c = pairs_to_chars(p);
  NumericalSemigroup sg = pairs_to_semigroup(p);
  struct Pod {
    Rat root;
    Int level, nu;
  };
  std::vector<Pod> pods;
  // Per level i: sigma_nu = -(m_i + n_1...n_i + nu) / (n_i beta-bar_i) over
  // nu in the level semigroup, filtered by both non-integrality conditions.
  Int n_prod = 1;
  for (Int i = 1; i <= c.g(); ++i) {
    n_prod = checked_mul(n_prod, c.nn[static_cast<size_t>(i)]);
    Int Ni = checked_mul(c.nn[static_cast<size_t>(i)], sg.generators[static_cast<size_t>(i)]);
    Int ki = checked_add(c.mm[static_cast<size_t>(i)], n_prod);
    // Gamma_i = < n_1...n_i, n_2...n_i m-bar_1, ..., m-bar_i >.
    std::vector<Int> gens;
    {
      Int lead = 1;
      for (Int t = 1; t <= i; ++t) lead = checked_mul(lead, c.nn[static_cast<size_t>(t)]);
      gens.push_back(lead);
      for (Int t = 1; t <= i; ++t) {
        Int val = sg.reduced[static_cast<size_t>(t)];
        for (Int u = t + 1; u <= i; ++u) val = checked_mul(val, c.nn[static_cast<size_t>(u)]);
        gens.push_back(val);
      }
    }
    std::vector<char> reach(static_cast<size_t>(Ni), 0);
    reach[0] = 1;
    for (Int gen : gens)
      for (Int x = gen; x < Ni; ++x)
        if (reach[static_cast<size_t>(x - gen)]) reach[static_cast<size_t>(x)] = 1;
    for (Int nu = 0; nu < Ni; ++nu) {
      if (!reach[static_cast<size_t>(nu)]) continue;
      // e_{i-1} sigma and beta-bar_i sigma not integral, as residues mod Ni.
      if (checked_mul(c.e[static_cast<size_t>(i - 1)], ki + nu) % Ni == 0) continue;
      if (checked_mul(sg.generators[static_cast<size_t>(i)], ki + nu) % Ni == 0) continue;
      Rat s(-(ki + nu), Ni);
      pods.push_back({s, i, nu});
    }
  }
  std::sort(pods.begin(), pods.end(), [](const Pod& a, const Pod& b) { return a.root > b.root; });
  RootMultiset out;
  out.entries.reserve(pods.size() + 1);
  bool saw_minus_one = false;
  for (const auto& pod : pods) {
    if (out.entries.empty() || out.entries.back().root != pod.root) {
      RootEntry e;
      e.root = pod.root;
      e.multiplicity = 1;
      out.entries.push_back(std::move(e));
    }
    out.entries.back().sources.push_back({pod.level, -1, pod.nu, RootCriterion::ClosedForm});
    saw_minus_one |= pod.root == Rat(-1);
  }
  require_internal(!saw_minus_one, "closed-form filters admitted -1");
  RootEntry minus_one;
  minus_one.root = Rat(-1);
  minus_one.multiplicity = 1;
  minus_one.sources.push_back({-1, -1, 0, RootCriterion::NonExceptional});
  auto pos = std::lower_bound(out.entries.begin(), out.entries.end(), Rat(-1),
                              [](const RootEntry& e, const Rat& r) { return e.root > r; });
  out.entries.insert(pos, std::move(minus_one));
  return out;
}

Rat log_canonical_threshold(const DualGraph& g) {
  Rat best(0);
  bool first = true;
  for (Int v = 0; v < g.n_vertices(); ++v) {
    Rat ratio(g.verts[static_cast<size_t>(v)].k, g.verts[static_cast<size_t>(v)].N);
    if (first || ratio < best) best = ratio;
    first = false;
  }
  for (const auto& a : g.arrows) {
    Rat ratio(1, a.N);
    if (ratio < best) best = ratio;
  }
  return best;
}

RootMultiset non_exceptional_roots(const DualGraph& g) {
  std::map<Rat, RootEntry> found;
  Rat lct = log_canonical_threshold(g);
  for (Int a = 0; a < g.n_arrows(); ++a) {
    Int N = g.arrows[static_cast<size_t>(a)].N;
    Int host = g.arrows[static_cast<size_t>(a)].host;
    for (Int j = 1; j <= N; ++j) {
      Rat r(-j, N);
      RootEntry e;
      e.root = r;
      e.multiplicity = 1;
      e.sources.push_back({-1, a, j, RootCriterion::NonExceptional});
      // The only non-exceptional candidate for a double root is -1/N_k,
      // necessarily the lct; the host must realize the same candidate
      // ratio (an adjacent equal-ratio pair).
      if (j == 1 && r == -lct &&
          Rat(g.verts[static_cast<size_t>(host)].k, g.verts[static_cast<size_t>(host)].N) ==
              Rat(1, N)) {
        e.lct_double_note = true;
        if (!g.is_rupture(host)) {
          e.multiplicity = 2;
          e.sources.back().criterion = RootCriterion::NonExceptionalLctDouble;
        }
      }
      auto it = found.find(r);
      if (it == found.end()) {
        found.emplace(r, e);
      } else {
        it->second.sources.push_back(e.sources[0]);
        it->second.multiplicity = std::max(it->second.multiplicity, e.multiplicity);
        it->second.lct_double_note |= e.lct_double_note;
      }
    }
  }
  RootMultiset out;
  for (auto& [r, e] : found) out.entries.push_back(e);
  std::sort(out.entries.begin(), out.entries.end(),
            [](const RootEntry& a, const RootEntry& b) { return a.root > b.root; });
  return out;
}

RootsResult topological_roots_full(const DualGraph& g) {
  require_input(g.minimal, "root computations need the minimal log resolution");
  RootsResult res;

  struct Pod {
    Rat root;
    Int vertex, v;
    Int multiplicity;
    Int criterion;  // 0 eps-zero, 1 three-nonintegers
  };
  std::vector<Pod> pods;
  std::map<Rat, std::vector<Rat>> witness_eps;
  std::map<Rat, AdmissibleChain> chains;

  // The witness route costs a representation DP per value; run it on a
  // sample (and on every multiplicity-2 value) as a cross-check, and decide
  // everything else by the fractional classes.
  for (Int vtx = 0; vtx < g.n_vertices(); ++vtx) {
    if (!g.is_rupture(vtx)) continue;
    Int sampled = 0;
    VertexClassifier classifier(g, vtx);
    for (Int v : attainable_values(g, vtx)) {
      auto cls = classifier.classify(v);
      bool want_witness = cls.multiplicity == 2 || (sampled < 8 && cls.multiplicity > 0) ||
                          g.verts[static_cast<size_t>(vtx)].N <= 512;
      if (want_witness) {
        ++sampled;
        auto full = classify_root(g, vtx, v);
        require_internal(full.multiplicity == cls.multiplicity,
                         "sampled witness classification mismatch");
        cls = full;
        if (cls.multiplicity > 0 && !witness_eps.count(cls.sigma_value))
          witness_eps.emplace(cls.sigma_value, cls.eps);
      }
      if (cls.multiplicity == 0) {
        res.unclassified.push_back(RootSource{vtx, -1, v, cls.criterion});
        continue;
      }
      pods.push_back({cls.sigma_value, vtx, v, cls.multiplicity,
                      cls.criterion == RootCriterion::EpsZero ? Int(0) : Int(1)});
      // Multiplicity-2 entries carry an admissible-chain certificate.
      if (cls.multiplicity == 2 && !chains.count(cls.sigma_value)) {
        auto rep = greedy_site_representation(g, vtx, v);
        require_internal(rep.has_value(), "attainable value without representation");
        auto chain = find_maximal_admissible_chain(g, *rep, vtx);
        require_internal(chain.has_value(),
                         "multiplicity-2 root without an admissible chain certificate");
        chains.emplace(cls.sigma_value, std::move(*chain));
      }
    }
  }

  std::map<Rat, RootEntry> found;
  for (const auto& e : non_exceptional_roots(g).entries) found.emplace(e.root, e);
  std::sort(pods.begin(), pods.end(), [](const Pod& a, const Pod& b) { return a.root > b.root; });
  RootMultiset merged;
  merged.entries.reserve(pods.size() + found.size());
  for (const auto& pod : pods) {
    if (merged.entries.empty() || merged.entries.back().root != pod.root) {
      RootEntry e;
      e.root = pod.root;
      e.multiplicity = pod.multiplicity;
      merged.entries.push_back(std::move(e));
    }
    auto& entry = merged.entries.back();
    entry.multiplicity = std::max(entry.multiplicity, pod.multiplicity);
    entry.sources.push_back(RootSource{pod.vertex, -1, pod.v,
                                       pod.criterion == 0 ? RootCriterion::EpsZero
                                                          : RootCriterion::ThreeNonIntegers});
  }
  for (auto& entry : merged.entries) {
    auto it = found.find(entry.root);
    if (it == found.end()) {
      found.emplace(entry.root, std::move(entry));
    } else {
      it->second.multiplicity = std::max(it->second.multiplicity, entry.multiplicity);
      for (auto& s : entry.sources) it->second.sources.push_back(std::move(s));
    }
  }
  res.roots.entries.reserve(found.size());
  for (auto& [r, e] : found) res.roots.entries.push_back(std::move(e));
  std::sort(res.roots.entries.begin(), res.roots.entries.end(),
            [](const RootEntry& a, const RootEntry& b) { return a.root > b.root; });
  for (auto& e : res.roots.entries) {
    auto weps = witness_eps.find(e.root);
    if (weps != witness_eps.end()) e.eps_witness = weps->second;
    auto wchain = chains.find(e.root);
    if (wchain != chains.end()) e.chain = wchain->second;
  }
  return res;
}

RootMultiset topological_roots(const DualGraph& g) { return topological_roots_full(g).roots; }

}  // namespace toproots
