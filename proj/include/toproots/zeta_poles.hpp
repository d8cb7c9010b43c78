#ifndef TOPROOTS_ZETA_POLES_HPP
#define TOPROOTS_ZETA_POLES_HPP

#include <string>
#include <vector>

#include "toproots/bs_roots.hpp"

namespace toproots {

// The local topological zeta function as an exact rational function, stored
// by principal parts: Z(s) = sum over poles of a1/(s - r) + a2/(s - r)^2.
// The polynomial part is zero (the function vanishes at infinity); this is
// verified by exact evaluation against the defining sum.
struct PrincipalPart {
  Rat location;
  std::string a1;  // coefficient of (s - location)^{-1}, exact "p/q"
  std::string a2;  // coefficient of (s - location)^{-2}, exact "p/q"
  Int pole_order = 0;
};

struct RationalFunction {
  std::vector<PrincipalPart> parts;  // every candidate with a nonzero part

  Int pole_order(const Rat& x) const;
};

// Z_top,x(f; s) from the numerical data of the minimal log resolution; the
// principal-part representation is verified against the defining sum of
// simple terms at several sample points.
RationalFunction topological_zeta(const DualGraph& g);

// Poles with orders from the exact rational function.
std::vector<std::pair<Rat, Int>> zeta_poles_exact(const DualGraph& g);

struct PoleEntry {
  Rat location;
  Int order = 1;
  std::vector<Int> rupture_witnesses;                  // divisors with -k/N = location
  std::vector<std::pair<Int, Int>> equal_ratio_pairs;  // adjacent equal-ratio pairs
  std::vector<Int> arrow_witnesses;                    // arrowheads with -1/N = location
};

// Pole set with orders by the combinatorial classification (rupture
// divisors, adjacent equal-ratio intersections, strict-transform factors);
// cross-checked exactly against the rational-function path.
std::vector<PoleEntry> pole_classification(const DualGraph& g);

struct ZetaMatch {
  Rat location;
  Int order = 0;
  bool matched = false;
  Int multiplicity = 0;
};

struct ZetaContainmentReport {
  bool pass = true;
  std::vector<ZetaMatch> matches;
};

// Containment, zeta half: every pole of order d is a root of multiplicity
// at least d.
ZetaContainmentReport check_zeta_containment(const DualGraph& g);
ZetaContainmentReport check_zeta_containment(const DualGraph& g, const RootMultiset& roots);

}  // namespace toproots

#endif
