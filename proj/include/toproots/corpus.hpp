#ifndef TOPROOTS_CORPUS_HPP
#define TOPROOTS_CORPUS_HPP

#include <random>
#include <vector>

#include "toproots/curve_input.hpp"

namespace toproots {

struct CorpusOptions {
  Int max_branches = 3;
  Int max_pairs = 3;     // Puiseux pairs per branch
  Int max_entry = 12;    // bound on q_i
  Int max_den = 5;       // bound on n_i (<= max_entry)
  Int max_power = 3;
  bool allow_smooth = true;
};

// A random irreducible branch within the given bounds.
BranchSpec random_branch(std::mt19937& rng, const CorpusOptions& opt = {});

// A random valid curve: branches plus a grid-compatible ultrametric contact
// matrix (built by rejection against the full validator).
CurveSpec random_curve(std::mt19937& rng, const CorpusOptions& opt = {});

// Deterministic corpora for tests.
std::vector<CurveSpec> test_corpus_curves(Int count, unsigned seed, const CorpusOptions& opt = {});
std::vector<BranchSpec> test_corpus_branches(Int count, unsigned seed, const CorpusOptions& opt = {});

}  // namespace toproots

#endif
