#include "doctest.h"
#include "toproots/zeta_poles.hpp"
#include "toproots/corpus.hpp"

#include <set>

using namespace toproots;

namespace {

std::set<std::pair<Rat, Int>> pole_set(const DualGraph& g) {
  std::set<std::pair<Rat, Int>> out;
  for (auto& [loc, order] : zeta_poles_exact(g)) out.insert({loc, order});
  return out;
}

}  // namespace

TEST_CASE("zeta poles of basic germs") {
  auto sm = build_from_branch({make_char_sequence(1, {}), 1});
  CHECK(pole_set(sm) == std::set<std::pair<Rat, Int>>{{Rat(-1), 1}});

  auto cusp = build_from_branch({make_char_sequence(2, {3}), 1});
  CHECK(pole_set(cusp) == std::set<std::pair<Rat, Int>>{{Rat(-5, 6), 1}, {Rat(-1), 1}});

  auto dbl = build_from_branch({make_char_sequence(2, {3}), 2});
  CHECK(pole_set(dbl) == std::set<std::pair<Rat, Int>>{{Rat(-5, 12), 1}, {Rat(-1, 2), 1}});

  BranchSpec line{make_char_sequence(1, {}), 1};
  auto xy = build_from_curve(make_curve_spec(
      {line, line}, {{std::nullopt, Rat(1)}, {Rat(1), std::nullopt}}));
  CHECK(pole_set(xy) == std::set<std::pair<Rat, Int>>{{Rat(-1), 2}});

  // f = x^2: the candidate -1 cancels, only the strict factor survives.
  auto sq = build_from_branch({make_char_sequence(1, {}), 2});
  CHECK(pole_set(sq) == std::set<std::pair<Rat, Int>>{{Rat(-1, 2), 1}});
}

TEST_CASE("zeta poles of the s-family") {
  for (Int s = 3; s <= 6; ++s) {
    CAPTURE(s);
    auto g = build_from_branch({make_char_sequence(4, {6, 2 * s + 1}), 1});
    CHECK(pole_set(g) == std::set<std::pair<Rat, Int>>{
                             {Rat(-5, 12), 1}, {Rat(-(2 * s + 5), 4 * s + 14), 1}, {Rat(-1), 1}});
  }
}

TEST_CASE("classification agrees with the exact rational function") {
  for (const auto& spec : test_corpus_curves(25, 1818)) {
    auto g = build_from_curve(spec);
    // pole_classification cross-checks against zeta_poles_exact internally.
    auto poles = pole_classification(g);
    for (const auto& p : poles) {
      CHECK(p.location < Rat(0));
      CHECK((p.order == 1 || p.order == 2));
      if (p.order == 2) CHECK(!p.equal_ratio_pairs.empty());
    }
  }
}

TEST_CASE("Euler characteristic additivity") {
  for (const auto& spec : test_corpus_curves(20, 2718)) {
    auto g = build_from_curve(spec);
    Int total = 0, edges = 0;
    for (Int v = 0; v < g.n_vertices(); ++v) {
      total += 2 - g.r_of(v);
      edges += static_cast<Int>(g.verts[static_cast<size_t>(v)].nbrs.size());
    }
    edges /= 2;
    CHECK(total + edges + g.n_arrows() == g.n_vertices() + 1);
  }
}

TEST_CASE("zeta containment") {
  auto cusp = build_from_branch({make_char_sequence(2, {3}), 1});
  auto rep = check_zeta_containment(cusp);
  CHECK(rep.pass);
  REQUIRE(rep.matches.size() == 2);

  for (const auto& spec : test_corpus_curves(15, 3141)) {
    auto g = build_from_curve(spec);
    auto r = check_zeta_containment(g);
    CHECK(r.pass);
  }
}
