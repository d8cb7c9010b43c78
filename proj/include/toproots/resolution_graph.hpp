#ifndef TOPROOTS_RESOLUTION_GRAPH_HPP
#define TOPROOTS_RESOLUTION_GRAPH_HPP

#include <map>
#include <string>
#include <vector>

#include "toproots/curve_input.hpp"

namespace toproots {

// Adjacency slot of a vertex. Slot 0 is E_{i_1}, slot 1 is E_{i_2}; both may
// be the zero divisor (N = 0, k = 1, valuations 0), in which case residue
// numbers at that slot equal 1 identically. Slots 2.. are the remaining
// neighbors and arrowheads.
struct SlotRef {
  enum Kind { Zero, Vertex, Arrow };
  Kind kind = Zero;
  Int id = -1;

  bool is_zero() const { return kind == Zero; }
};

struct VertexData {
  Int N = 0;
  Int k = 0;
  Int self_int = 0;
  bool satellite = false;
  Int birth = -1;                    // position in the blow-up sequence
  std::vector<Int> nbrs;             // adjacent exceptional vertices
  std::vector<Int> arrows;           // arrowheads rooted here
  std::map<Int, Int> dec;            // neighbor vertex -> decoration at this end
  std::vector<SlotRef> slots;        // slot 0 = E_{i_1}, slot 1 = E_{i_2}, ...
};

struct ArrowData {
  Int host = -1;
  Int N = 1;        // multiplicity of the branch as component of the curve
  Int branch = -1;  // index into the originating CurveSpec, if any
};

// Numerical data of the divisorial valuation attached to a vertex, read off
// the curvette through its birth chain.
struct VertexProfile {
  CharSequence curvette;    // extended characteristic data of v_i
  NumericalSemigroup sg;    // value semigroup of v_i
  Int n_g = 1;              // last (extended) pair denominator
  Int m_bar_g = 1;          // last reduced semigroup generator
  Int mu0 = 1;              // n_1 ... n_g = curvette multiplicity at the origin
  Int m_g = 1;              // last reduced characteristic exponent
  std::vector<Int> chain;   // birth chain of the vertex (point ids)
  std::vector<Int> curvette_mult;  // curvette multiplicities along the chain
};

// A site carries one curvette (or branch) factor of the monomial form model.
struct Site {
  bool is_arrow = false;
  Int id = -1;  // vertex id or arrowhead id
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct VertexClass {
  Int r = 0;        // components of Supp F_pi meeting the vertex
  Int m = 0;        // adjacency slots including zero divisors
  Int valency = 0;  // exceptional neighbors + arrowheads
  bool rupture = false;
  bool satellite = false;
  bool dead_end = false;
};

class DualGraph {
public:
  std::vector<VertexData> verts;
  std::vector<ArrowData> arrows;
  Int root = 0;
  bool minimal = true;

  // Cluster structure: one infinitely near point per vertex, in birth order.
  std::vector<std::vector<Int>> prox;  // points this point is proximate to

  std::vector<VertexProfile> profile;

  // Sites of the differential-form model (r != 2 vertices, then arrowheads).
  std::vector<Site> sites;
  // site_val[s][q] = v_q(f_s): valuation of the site element along E_q.
  std::vector<std::vector<Int>> site_val;

  Int n_vertices() const { return static_cast<Int>(verts.size()); }
  Int n_arrows() const { return static_cast<Int>(arrows.size()); }

  Int r_of(Int v) const {
    return static_cast<Int>(verts[static_cast<size_t>(v)].nbrs.size() +
                            verts[static_cast<size_t>(v)].arrows.size());
  }
  bool is_rupture(Int v) const { return r_of(v) >= 3; }

  Int site_index(bool is_arrow, Int id) const;
  Int site_of_vertex(Int v) const { return site_index(false, v); }

  // Numerical data of a slot: {N, k} with the zero-divisor conventions.
  std::pair<Int, Int> slot_Nk(const SlotRef& s) const;
  // Valuation of a site element along a slot divisor (gamma for arrow slots
  // is handled by the caller; this returns v_{slot}(f_site) for divisors).
  Int slot_site_val(const SlotRef& s, Int site) const;

  // Component of the tree minus `v` containing `nbr`, as a vertex set.
  std::vector<Int> component_without(Int v, Int nbr) const;
  // Product of the decorations at `v` except the one toward `nbr`
  // (nbr = -1: product over all decorations at v).
  Int far_decoration_product(Int v, Int nbr) const;
};

// Construction from equisingularity data (cluster-of-infinitely-near-points
// simulation; exact integer arithmetic throughout).
DualGraph build_from_branch(const BranchSpec& b);
DualGraph build_from_curve(const CurveSpec& c);

// Assembly from raw combinatorial data (hand-entered graphs). Exactly one of
// self-intersections / decorations must be supplied; the other is derived and
// verified. decorations[{v,w}] = decoration at v along edge (v,w).
struct RawGraph {
  Int n_vertices = 0;
  std::vector<std::pair<Int, Int>> edges;
  std::vector<std::pair<Int, Int>> arrowheads;  // (host, N)
  std::vector<Int> self_intersections;          // empty if decorations given
  std::map<std::pair<Int, Int>, Int> decorations;
  std::vector<Int> birth_order;  // optional
};

DualGraph assemble_graph(const RawGraph& raw, bool allow_non_minimal = false);

ValidationReport validate_graph(const DualGraph& g);

// Diagram calculus (independent second computation of the numerical data).
std::vector<Int> diagram_calculus_N(const DualGraph& g);
std::vector<Int> diagram_calculus_k(const DualGraph& g);

// v_{at}(f_elem) where elem designates the curvette of a vertex or an
// arrowhead branch; computed by the path-product calculus.
Int valuation_of_element(const DualGraph& g, const Site& elem, Int at);

const VertexProfile& neighbor_profile(const DualGraph& g, Int v);

std::vector<VertexClass> classify_vertices(const DualGraph& g);

// Splits N_i and N_j across the edge (i, j) by the arrowheads on each side; returns (gamma_0, gamma_1).
std::pair<Int, Int> adjacent_decomposition(const DualGraph& g, Int i, Int j);

// Test-only refinement passes (produce non-minimal graphs).
DualGraph blow_up_edge(const DualGraph& g, Int a, Int b);
DualGraph blow_up_free_point(const DualGraph& g, Int v);

}  // namespace toproots

#endif
