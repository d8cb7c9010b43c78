#include "doctest.h"
#include "toproots/bs_roots.hpp"
#include "toproots/corpus.hpp"

#include <set>

using namespace toproots;

namespace {

PuiseuxPairs pairs_of(std::vector<std::pair<Int, Int>> ps) {
  PuiseuxPairs p;
  p.pairs = std::move(ps);
  return p;
}

std::set<std::pair<Rat, Int>> as_set(const RootMultiset& m) {
  std::set<std::pair<Rat, Int>> out;
  for (const auto& e : m.entries) out.insert({e.root, e.multiplicity});
  return out;
}

}  // namespace

TEST_CASE("attainable values at the cusp rupture vertex") {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  CHECK(attainable_values(g, 2) == std::vector<Int>{0, 2, 3, 4, 5});
  CHECK_THROWS_AS(attainable_values(g, 0), input_error);
}

TEST_CASE("classify_root at the cusp") {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  auto c0 = classify_root(g, 2, 0);
  CHECK(c0.multiplicity == 1);
  CHECK(c0.sigma_value == Rat(-5, 6));
  CHECK(c0.eps == std::vector<Rat>{Rat(1, 2), Rat(1, 3), Rat(1, 6)});

  auto c2 = classify_root(g, 2, 2);
  CHECK(c2.multiplicity == 1);
  CHECK(c2.sigma_value == Rat(-7, 6));

  auto c3 = classify_root(g, 2, 3);
  CHECK(c3.multiplicity == 0);  // root -4/3 fails both criteria

  CHECK_THROWS_AS(classify_root(g, 2, 1), input_error);  // 1 not attainable
}

TEST_CASE("closed-form roots of the cusp") {
  auto roots = roots_irreducible_closed_form(pairs_of({{3, 2}}));
  CHECK(as_set(roots) ==
        std::set<std::pair<Rat, Int>>{{Rat(-5, 6), 1}, {Rat(-7, 6), 1}, {Rat(-1), 1}});
}

TEST_CASE("closed-form roots of the s-family") {
  for (Int s = 3; s <= 6; ++s) {
    CAPTURE(s);
    auto roots = roots_irreducible_closed_form(pairs_of({{3, 2}, {2 * s - 5, 2}}));
    // E_2 contributes exactly {-5/12, -7/12, -11/12, -13/12}.
    std::set<Rat> from_e2;
    for (const auto& e : roots.entries)
      for (const auto& src : e.sources)
        if (src.divisor == 1) from_e2.insert(e.root);
    CHECK(from_e2 == std::set<Rat>{Rat(-5, 12), Rat(-7, 12), Rat(-11, 12), Rat(-13, 12)});
    // E_{s+1} contributes exactly 2s + 6 roots.
    std::set<Rat> from_top;
    for (const auto& e : roots.entries)
      for (const auto& src : e.sources)
        if (src.divisor == 2) from_top.insert(e.root);
    CHECK(static_cast<Int>(from_top.size()) == 2 * s + 6);
    CHECK(roots.find(Rat(-1)) != nullptr);
  }
}

TEST_CASE("topological roots of the cusp via the graph pipeline") {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  auto full = topological_roots_full(g);
  CHECK(as_set(full.roots) ==
        std::set<std::pair<Rat, Int>>{{Rat(-5, 6), 1}, {Rat(-7, 6), 1}, {Rat(-1), 1}});
  // Unclassified candidates at E_2: v = 3, 4, 5.
  CHECK(full.unclassified.size() == 3);
}

TEST_CASE("non-exceptional roots") {
  auto dbl = build_from_branch({make_char_sequence(2, {3}), 2});
  auto r = non_exceptional_roots(dbl);
  CHECK(as_set(r) == std::set<std::pair<Rat, Int>>{{Rat(-1, 2), 1}, {Rat(-1), 1}});

  auto triple = build_from_branch({make_char_sequence(1, {}), 3});
  auto t = non_exceptional_roots(triple);
  CHECK(as_set(t) ==
        std::set<std::pair<Rat, Int>>{{Rat(-1, 3), 1}, {Rat(-2, 3), 1}, {Rat(-1), 1}});

  auto plain = build_from_branch({make_char_sequence(2, {3}), 1});
  CHECK(as_set(non_exceptional_roots(plain)) == std::set<std::pair<Rat, Int>>{{Rat(-1), 1}});
}

TEST_CASE("f = xy: the lct-double Remark case") {
  BranchSpec line{make_char_sequence(1, {}), 1};
  auto xy = build_from_curve(make_curve_spec(
      {line, line}, {{std::nullopt, Rat(1)}, {Rat(1), std::nullopt}}));
  auto roots = topological_roots(xy);
  const RootEntry* e = roots.find(Rat(-1));
  REQUIRE(e != nullptr);
  CHECK(e->multiplicity == 2);
  CHECK(e->lct_double_note);
  CHECK(log_canonical_threshold(xy) == Rat(1));
}

TEST_CASE("oracle equivalence on random irreducible branches") {
  for (const auto& b : test_corpus_branches(30, 2024)) {
    auto g = build_from_branch(b.power == 1 ? b : BranchSpec{b.invariants, 1});
    auto lhs = topological_roots(g);
    auto rhs = roots_irreducible_closed_form(chars_to_pairs(b.invariants));
    CAPTURE(b.invariants.n);
    REQUIRE(lhs.entries.size() == rhs.entries.size());
    for (size_t i = 0; i < lhs.entries.size(); ++i) {
      CHECK(lhs.entries[i].root == rhs.entries[i].root);
      CHECK(lhs.entries[i].multiplicity == rhs.entries[i].multiplicity);
    }
  }
}

TEST_CASE("root hypotheses and certificates on the curve corpus") {
  for (const auto& spec : test_corpus_curves(20, 902)) {
    auto g = build_from_curve(spec);
    auto full = topological_roots_full(g);
    bool reduced = true;
    for (const auto& b : spec.branches) reduced &= b.power == 1;
    for (const auto& e : full.roots.entries) {
      CHECK(e.root < Rat(0));
      CHECK((e.multiplicity == 1 || e.multiplicity == 2));
      if (reduced) CHECK(e.multiplicity <= 2);
      if (e.multiplicity == 2) {
        bool exceptional_source = false;
        for (const auto& s : e.sources) exceptional_source |= s.divisor >= 0;
        if (exceptional_source) {
          REQUIRE(e.chain.has_value());
          CHECK(!e.chain->path.empty());
        }
      }
      // Rupture roots have the form -(k_i + v)/N_i with 0 <= v < N_i.
      for (const auto& s : e.sources) {
        if (s.divisor < 0) continue;
        const auto& vd = g.verts[static_cast<size_t>(s.divisor)];
        CHECK(e.root == Rat(-(vd.k + s.v), vd.N));
        CHECK(s.v >= 0);
        CHECK(s.v < vd.N);
      }
    }
  }
}

TEST_CASE("attainable values agree with the valuation semigroup on irreducible inputs") {
  for (const auto& b : test_corpus_branches(12, 31415)) {
    auto g = build_from_branch({b.invariants, 1});
    for (Int v = 0; v < g.n_vertices(); ++v) {
      if (!g.is_rupture(v)) continue;
      auto vals = attainable_values(g, v);
      const auto& sg = g.profile[static_cast<size_t>(v)].sg;
      auto sieve = semigroup_sieve(sg, g.verts[static_cast<size_t>(v)].N - 1);
      std::vector<Int> expect;
      for (Int x = 0; x < g.verts[static_cast<size_t>(v)].N; ++x)
        if (sieve[static_cast<size_t>(x)]) expect.push_back(x);
      CHECK(vals == expect);
    }
  }
}
