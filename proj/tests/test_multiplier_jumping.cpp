#include "doctest.h"
#include "toproots/multiplier_jumping.hpp"
#include "toproots/corpus.hpp"

#include <set>

using namespace toproots;

TEST_CASE("antinef closure basics") {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  ExceptionalDivisor zero(3, 0);
  CHECK(antinef_closure(g, zero) == zero);  // already antinef

  // Idempotence and antinef output on assorted divisors.
  for (Int a = 0; a <= 2; ++a)
    for (Int b = 0; b <= 2; ++b)
      for (Int c = 0; c <= 2; ++c) {
        ExceptionalDivisor D{a, b, c};
        auto closed = antinef_closure(g, D);
        CHECK(antinef_closure(g, closed) == closed);
        for (Int v = 0; v < 3; ++v) CHECK(divisor_product(g, closed, {}, v) <= 0);
        for (Int v = 0; v < 3; ++v) CHECK(closed[static_cast<size_t>(v)] >= D[static_cast<size_t>(v)]);
      }

  // Monotone.
  ExceptionalDivisor D1{1, 0, 0}, D2{1, 1, 0};
  auto c1 = antinef_closure(g, D1), c2 = antinef_closure(g, D2);
  for (Int v = 0; v < 3; ++v) CHECK(c1[static_cast<size_t>(v)] <= c2[static_cast<size_t>(v)]);

  // Single-vertex graph: (1) is already antinef.
  auto sm = build_from_branch({make_char_sequence(1, {}), 1});
  CHECK(antinef_closure(sm, {1}) == ExceptionalDivisor{1});
}

TEST_CASE("jumping numbers of the cusp") {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  auto jn = jumping_numbers(g);
  REQUIRE(jn.size() == 1);
  CHECK(jn[0].value == Rat(5, 6));
  CHECK(jn[0].contributing == std::vector<Int>{2});
}

TEST_CASE("jumping numbers of the s-family") {
  for (Int s = 3; s <= 6; ++s) {
    CAPTURE(s);
    auto g = build_from_branch({make_char_sequence(4, {6, 2 * s + 1}), 1});
    auto jn = jumping_numbers(g);
    CHECK(static_cast<Int>(jn.size()) == s + 5);  // mu / 2
    std::set<Rat> values;
    for (const auto& j : jn) values.insert(j.value);
    CHECK(values.count(Rat(5, 12)));
    CHECK(values.count(Rat(11, 12)));
    CHECK(values.count(Rat(2 * s + 9, 4 * s + 14)));
  }
}

TEST_CASE("smooth branch has no jumping numbers below 1") {
  auto g = build_from_branch({make_char_sequence(1, {}), 1});
  CHECK(jumping_numbers(g).empty());
}

TEST_CASE("lct is the smallest jumping number") {
  for (const auto& spec : test_corpus_curves(20, 606)) {
    auto g = build_from_curve(spec);
    auto jn = jumping_numbers(g);
    Rat lct = log_canonical_threshold(g);
    if (lct < Rat(1)) {
      REQUIRE(!jn.empty());
      CHECK(jn.front().value == lct);
    } else {
      CHECK(jn.empty());
    }
  }
}

TEST_CASE("irreducible curves have conductor/2 jumping numbers in (0,1)") {
  for (const auto& b : test_corpus_branches(15, 4096)) {
    BranchSpec reduced{b.invariants, 1};
    auto g = build_from_branch(reduced);
    auto sg = pairs_to_semigroup(chars_to_pairs(b.invariants));
    auto jn = jumping_numbers(g);
    CHECK(static_cast<Int>(jn.size()) == sg.conductor / 2);
  }
}

TEST_CASE("jumping numbers are stable under extra blow-ups") {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  auto base = jumping_numbers(g);
  auto g2 = blow_up_edge(g, 0, 2);
  auto g3 = blow_up_free_point(g, 1);
  auto jn2 = jumping_numbers(g2);
  auto jn3 = jumping_numbers(g3);
  REQUIRE(jn2.size() == base.size());
  REQUIRE(jn3.size() == base.size());
  for (size_t i = 0; i < base.size(); ++i) {
    CHECK(jn2[i].value == base[i].value);
    CHECK(jn3[i].value == base[i].value);
  }
}

TEST_CASE("jumping containment") {
  auto g = build_from_branch({make_char_sequence(2, {3}), 1});
  auto rep = check_jumping_containment(g);
  CHECK(rep.pass);
  REQUIRE(rep.matches.size() == 1);
  CHECK(rep.matches[0].value == Rat(5, 6));
  CHECK(rep.matches[0].matched);

  for (const auto& spec : test_corpus_curves(15, 808)) {
    auto gg = build_from_curve(spec);
    CHECK(check_jumping_containment(gg).pass);
  }
}
