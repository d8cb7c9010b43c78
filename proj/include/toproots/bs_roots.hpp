#ifndef TOPROOTS_BS_ROOTS_HPP
#define TOPROOTS_BS_ROOTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "toproots/forms_residues.hpp"

namespace toproots {

enum class RootCriterion {
  EpsZero,
  ThreeNonIntegers,
  NonExceptional,
  NonExceptionalLctDouble,
  ClosedForm,
  Silent,
};

const char* criterion_name(RootCriterion c);

struct RootSource {
  Int divisor = -1;       // exceptional vertex, or -1 for non-exceptional
  Int arrow = -1;         // arrowhead id for non-exceptional sources
  Int v = 0;              // v_i(g) of the witness
  RootCriterion criterion = RootCriterion::Silent;
};

struct RootEntry {
  Rat root;                  // negative rational
  Int multiplicity = 1;      // 1 or 2
  std::vector<RootSource> sources;
  std::vector<Rat> eps_witness;            // residue vector of one witness
  std::optional<AdmissibleChain> chain;    // certificate for multiplicity 2
  bool lct_double_note = false;            // -1/N_k that is the lct (Remark)
};

struct RootMultiset {
  std::vector<RootEntry> entries;  // sorted descending (closest to 0 first)

  const RootEntry* find(const Rat& r) const {
    for (const auto& e : entries)
      if (e.root == r) return &e;
    return nullptr;
  }
};

// Values v in [0, N_i) realizable as v_i(g) over the form model.
std::vector<Int> attainable_values(const DualGraph& g, Int rupture_vertex);

struct RootClassification {
  Int multiplicity = 0;  // 2, 1, or 0 (no criterion applies)
  std::vector<Rat> eps;  // witness residue vector
  Rat sigma_value;
  RootCriterion criterion = RootCriterion::Silent;
};

// Classifies one rupture divisor and one attainable value; the witness
// classification is checked against a second independent witness.
RootClassification classify_root(const DualGraph& g, Int rupture_vertex, Int v);

// Closed-form root set for irreducible branches (independent oracle).
RootMultiset roots_irreducible_closed_form(const PuiseuxPairs& p);

// Roots contributed by the strict-transform components.
RootMultiset non_exceptional_roots(const DualGraph& g);

struct RootsResult {
  RootMultiset roots;
  // Candidate values on which no classification criterion applies
  // (diagnostics channel).
  std::vector<RootSource> unclassified;
};

RootsResult topological_roots_full(const DualGraph& g);
RootMultiset topological_roots(const DualGraph& g);

// Log canonical threshold: min over T of k_i / N_i (arrowheads give 1/N_k).
Rat log_canonical_threshold(const DualGraph& g);

}  // namespace toproots

#endif
