#ifndef TOPROOTS_MULTIPLIER_JUMPING_HPP
#define TOPROOTS_MULTIPLIER_JUMPING_HPP

#include <string>
#include <vector>

#include "toproots/bs_roots.hpp"

namespace toproots {

// Integer divisor supported on the exceptional locus.
using ExceptionalDivisor = std::vector<Int>;

// Intersection product (D + fixed arrowhead coefficients) . E_i.
Int divisor_product(const DualGraph& g, const ExceptionalDivisor& D,
                    const std::vector<Int>& arrow_coeffs, Int vertex);

// Minimal antinef divisor >= D (Laufer unloading). arrow_coeffs are the
// fixed strict-transform coefficients entering the intersection products.
ExceptionalDivisor antinef_closure(const DualGraph& g, ExceptionalDivisor D,
                                   const std::vector<Int>& arrow_coeffs = {});

struct JumpingNumber {
  Rat value;
  std::vector<Int> contributing;  // support of the minimal jumping divisor
};

// Jumping numbers in (0, 1), by the unloading sweep over the candidate grid.
std::vector<JumpingNumber> jumping_numbers(const DualGraph& g);

struct JumpingMatch {
  Rat value;
  bool matched = false;
  Int multiplicity = 0;
  std::string kind;  // "eps-zero" (adjacent components) or "three-nonintegers"
};

struct JumpingContainmentReport {
  bool pass = true;
  std::vector<JumpingMatch> matches;
};

// Containment, jumping half: opposites of the jumping numbers in (0,1)
// appear among the topological roots.
JumpingContainmentReport check_jumping_containment(const DualGraph& g);
JumpingContainmentReport check_jumping_containment(const DualGraph& g, const RootMultiset& roots);

}  // namespace toproots

#endif
