#ifndef TOPROOTS_FORMS_RESIDUES_HPP
#define TOPROOTS_FORMS_RESIDUES_HPP

#include <optional>
#include <vector>

#include "toproots/resolution_graph.hpp"

namespace toproots {

// Monomial differential form omega = g dx with g a product of curvettes over
// the sites of the graph (vertices of valency != 2 and arrowhead branches).
// exponents[s] is the power of the site element f_s.
struct FormExponent {
  std::vector<Int> exponents;

  static FormExponent zero(const DualGraph& g) {
    FormExponent f;
    f.exponents.assign(g.sites.size(), 0);
    return f;
  }
  bool is_dx() const {
    for (Int e : exponents)
      if (e != 0) return false;
    return true;
  }
};

// v_i(g) for the product encoded by the form.
Int form_valuation(const DualGraph& g, const FormExponent& w, Int vertex);

// sigma_i(omega) = -(k_i + v_i(g)) / N_i.
Rat sigma(const DualGraph& g, const FormExponent& w, Int vertex);

struct ResidueVector {
  Rat sigma_value;
  std::vector<Rat> eps;   // one per adjacency slot (zero slots give 1)
  Int delta = 0;          // gamma_i when the vertex itself is a site
};

// Residue numbers by the defining formula eps = N sigma + k + v (the defining formula),
// with the residue-sum identity asserted before returning.
ResidueVector residues(const DualGraph& g, const FormExponent& w, Int vertex);

// Same vector through the closed formulas of the alpha/beta decomposition
// (independent second path; must agree with residues() exactly).
ResidueVector residues_closed_form(const DualGraph& g, const FormExponent& w, Int vertex);

// Normalization: returns omega' with sigma preserved and all residue
// numbers in [-1, 1], by constructive rewriting over maximal contact
// elements.
FormExponent normalize_residues(const DualGraph& g, const FormExponent& w, Int vertex);

// The curvette-power pattern: N_i = lambda N_i(C_i) and likewise for both
// inner neighbors (the curve looks like a curvette power near the vertex);
// possible only for satellite vertices with r_i = 3.
bool curvette_power_case(const DualGraph& g, Int vertex);
std::optional<Int> curvette_power_ratio(const DualGraph& g, Int vertex);

// Whether some form with v_i(g) = v has a vanishing residue at the given
// slot; decided from the fractional parts of the closed formulas plus the
// arrowhead / curvette-power side conditions.
bool zero_achievable(const DualGraph& g, Int vertex, Int v, Int slot);

// Form-independent integrality of the slot residue at the given value
// (fractional classes of the closed formulas).
bool residue_integral_class(const DualGraph& g, Int vertex, Int v, Int slot);

// Brute-force witness search used as an oracle in tests: looks for a form
// with v_i = v and eps_slot = 0 among exponent vectors of bounded degree.
std::optional<FormExponent> zero_witness_search(const DualGraph& g, Int vertex, Int v, Int slot,
                                                Int degree_bound);

struct AdmissibleChain {
  std::vector<Int> path;       // vertex ids; arrowhead endpoints recorded apart
  std::vector<Int> arrow_endpoints;
  FormExponent witness;
  Rat sigma_value;
};

// Maximal admissible chain through a rupture vertex whose normalized form has
// a vanishing residue number. Greedy construction following the constructive
// proof, with a bounded search fallback; throws input_error("NoVanishingResidue")
// when the precondition fails.
std::optional<AdmissibleChain> find_maximal_admissible_chain(const DualGraph& g,
                                                             const FormExponent& w, Int vertex);

}  // namespace toproots

#endif
