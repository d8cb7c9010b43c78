#include "toproots/multiplier_jumping.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace toproots {

Int divisor_product(const DualGraph& g, const ExceptionalDivisor& D,
                    const std::vector<Int>& arrow_coeffs, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  Int total = checked_mul(D[static_cast<size_t>(vertex)], vd.self_int);
  for (Int w : vd.nbrs) total = checked_add(total, D[static_cast<size_t>(w)]);
  for (Int a : vd.arrows)
    if (!arrow_coeffs.empty()) total = checked_add(total, arrow_coeffs[static_cast<size_t>(a)]);
  return total;
}

ExceptionalDivisor antinef_closure(const DualGraph& g, ExceptionalDivisor D,
                                   const std::vector<Int>& arrow_coeffs) {
  require_input(static_cast<Int>(D.size()) == g.n_vertices(), "divisor size mismatch");
  // Unloading: while some E_i meets the divisor positively, raise the
  // coefficient by the least amount restoring non-positivity. Terminates on
  // negative-definite intersection matrices.
  bool changed = true;
  Int guard = 0;
  while (changed) {
    changed = false;
    for (Int v = 0; v < g.n_vertices(); ++v) {
      Int prod = divisor_product(g, D, arrow_coeffs, v);
      if (prod > 0) {
        Int denom = -g.verts[static_cast<size_t>(v)].self_int;
        Int bump = (prod + denom - 1) / denom;  // ceil(prod / -E^2)
        D[static_cast<size_t>(v)] = checked_add(D[static_cast<size_t>(v)], bump);
        changed = true;
      }
    }
    require_internal(++guard < (1 << 22), "unloading did not terminate");
  }
  return D;
}

namespace {

// Antinef closure of floor(lambda F) - K at the given candidate value. The
// sweep passes the previous closure as a warm start: closures are monotone
// in lambda, and unloading from max(D, previous closure) still yields the
// least antinef divisor above D.
struct ClosureAt {
  ExceptionalDivisor D;
  std::vector<Int> arrow_floor;
};

ClosureAt closure_at(const DualGraph& g, const Rat& lambda, const ExceptionalDivisor* warm) {
  ClosureAt out;
  out.arrow_floor.resize(static_cast<size_t>(g.n_arrows()));
  for (Int a = 0; a < g.n_arrows(); ++a)
    out.arrow_floor[static_cast<size_t>(a)] =
        (lambda * Rat(g.arrows[static_cast<size_t>(a)].N)).floor();
  ExceptionalDivisor D(static_cast<size_t>(g.n_vertices()));
  for (Int v = 0; v < g.n_vertices(); ++v) {
    const auto& vd = g.verts[static_cast<size_t>(v)];
    D[static_cast<size_t>(v)] = (lambda * Rat(vd.N)).floor() - (vd.k - 1);
    if (warm) D[static_cast<size_t>(v)] = std::max(D[static_cast<size_t>(v)],
                                                   (*warm)[static_cast<size_t>(v)]);
  }
  out.D = antinef_closure(g, std::move(D), out.arrow_floor);
  return out;
}

}  // namespace

std::vector<JumpingNumber> jumping_numbers(const DualGraph& g) {
  // Candidate grid: (k_i + v)/N_i over all divisors including arrowheads
  // (k = 1 there), intersected with (0, 1).
  std::set<Rat> candidates;
  for (Int v = 0; v < g.n_vertices(); ++v) {
    const auto& vd = g.verts[static_cast<size_t>(v)];
    for (Int x = vd.k; x < vd.k + vd.N; ++x) {
      Rat c(x, vd.N);
      if (c > Rat(0) && c < Rat(1)) candidates.insert(c);
    }
  }
  for (const auto& a : g.arrows)
    for (Int x = 1; x <= a.N; ++x) {
      Rat c(x, a.N);
      if (c > Rat(0) && c < Rat(1)) candidates.insert(c);
    }

  std::vector<JumpingNumber> out;
  ClosureAt prev = closure_at(g, Rat(0), nullptr);
  for (const Rat& lambda : candidates) {
    ClosureAt here = closure_at(g, lambda, &prev.D);
    if (here.D != prev.D || here.arrow_floor != prev.arrow_floor) {
      JumpingNumber jn;
      jn.value = lambda;
      // Minimal jumping divisor support: vertices computing lambda from the
      // previous closure, lambda = (k_i + v_i)/N_i with v_i from J(lambda-eps).
      for (Int v = 0; v < g.n_vertices(); ++v) {
        const auto& vd = g.verts[static_cast<size_t>(v)];
        if (Rat(vd.k + prev.D[static_cast<size_t>(v)], vd.N) == lambda)
          jn.contributing.push_back(v);
      }
      out.push_back(jn);
    }
    prev = here;
  }
  return out;
}

JumpingContainmentReport check_jumping_containment(const DualGraph& g) {
  return check_jumping_containment(g, topological_roots(g));
}

JumpingContainmentReport check_jumping_containment(const DualGraph& g, const RootMultiset& roots) {
  JumpingContainmentReport rep;
  for (const auto& jn : jumping_numbers(g)) {
    JumpingMatch m;
    m.value = jn.value;
    const RootEntry* e = roots.find(-jn.value);
    m.matched = e != nullptr;
    if (e) m.multiplicity = e->multiplicity;
    // Matching route: isolated support component -> three non-integer
    // residues; adjacent components -> a vanishing residue.
    bool adjacent = false;
    std::set<Int> support(jn.contributing.begin(), jn.contributing.end());
    for (Int v : jn.contributing)
      for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
        adjacent |= support.count(w) > 0;
    m.kind = adjacent ? "eps-zero" : "three-nonintegers";
    rep.pass &= m.matched;
    rep.matches.push_back(m);
  }
  return rep;
}

}  // namespace toproots
