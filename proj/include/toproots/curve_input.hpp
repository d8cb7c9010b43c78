#ifndef TOPROOTS_CURVE_INPUT_HPP
#define TOPROOTS_CURVE_INPUT_HPP

#include <optional>
#include <vector>

#include "toproots/rational.hpp"

namespace toproots {

// Discrete invariants of a plane branch: multiplicity n = e_0 and the
// characteristic exponents n < beta_1 < ... < beta_g. The "extended" flag
// marks sequences enlarged by non-characteristic exponents, for which the
// division counts n_i may equal 1 and the derived semigroup generators are
// not minimal.
struct CharSequence {
  Int n = 1;
  std::vector<Int> betas;
  bool extended = false;

  // Derived: e[0] = n, e[i] = gcd(e[i-1], beta_i); nn[i] = e[i-1]/e[i];
  // mm[i] = beta_i / e[i] (reduced exponents). Index 0 of nn/mm is padding.
  std::vector<Int> e, nn, mm;

  Int g() const { return static_cast<Int>(betas.size()); }
  bool smooth() const { return n == 1 && betas.empty(); }
};

CharSequence make_char_sequence(Int n, std::vector<Int> betas, bool extended = false);

struct PuiseuxPairs {
  // (q_i, n_i), i = 1..g; gcd(q_i, n_i) = 1 and n_i > 1 for non-extended
  // pairs. Extended lists may carry pairs with n_i = 1 (trivial-pair
  // convention for divisorial valuations).
  std::vector<std::pair<Int, Int>> pairs;
  bool extended = false;

  Int g() const { return static_cast<Int>(pairs.size()); }
};

PuiseuxPairs chars_to_pairs(const CharSequence& c);
CharSequence pairs_to_chars(const PuiseuxPairs& p);

struct NumericalSemigroup {
  std::vector<Int> generators;      // beta-bar_0 < ... < beta-bar_g
  std::vector<Int> reduced;         // m-bar_i = beta-bar_i / e_i
  std::vector<Int> nn;              // n_i, division counts (index 0 padding)
  Int conductor = 0;
  bool extended = false;

  Int g() const { return static_cast<Int>(generators.size()) - 1; }
};

NumericalSemigroup pairs_to_semigroup(const PuiseuxPairs& p);

bool semigroup_membership(const NumericalSemigroup& s, Int value);

// Membership table for 0..bound inclusive; table[v] iff v is in the semigroup.
std::vector<char> semigroup_sieve(const NumericalSemigroup& s, Int bound);

// Expression gamma = sum gamma_i * beta-bar_i with 0 <= gamma_i < n_i for
// i >= 1 (bounded representation). Deterministic: among all
// such representations returns the one minimizing (gamma_g, ..., gamma_1)
// lexicographically. Throws input_error("NotAMember") if gamma is not in
// the semigroup.
std::vector<Int> bounded_representation(const NumericalSemigroup& s, Int value);

// Conductor of the semigroup of a complete (non-extended) branch; equals
// the Milnor number for irreducible plane curve germs.
Int milnor_number_irreducible(const PuiseuxPairs& p);

struct BranchSpec {
  CharSequence invariants;
  Int power = 1;  // multiplicity of this branch as a component of the curve
};

// A curve germ: branches plus, for every unordered pair, the contact
// exponent (first Puiseux exponent at which the two branches differ).
struct CurveSpec {
  std::vector<BranchSpec> branches;
  std::vector<std::vector<std::optional<Rat>>> contacts;  // symmetric, null diagonal

  Int size() const { return static_cast<Int>(branches.size()); }
  const Rat& contact(Int a, Int b) const;
};

CurveSpec make_curve_spec(std::vector<BranchSpec> branches,
                          std::vector<std::vector<std::optional<Rat>>> contacts);

CurveSpec single_branch_curve(BranchSpec b);

// Intersection multiplicity of two branches with the given contact exponent.
Int intersection_multiplicity(const CharSequence& a, const CharSequence& b, const Rat& contact);

// Multiplicity sequence of the minimal embedded resolution of the branch
// (subtractive Euclid per characteristic stage). Smooth branches give the
// single entry {1}.
std::vector<Int> multiplicity_sequence(const CharSequence& c);

// Validates contact/grid compatibility for one pair; throws input_error
// with a description when the contact cannot be realized.
void validate_contact(const CharSequence& a, const CharSequence& b, const Rat& contact);

}  // namespace toproots

#endif
