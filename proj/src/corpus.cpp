#include "toproots/corpus.hpp"

#include <algorithm>
#include <set>

namespace toproots {

namespace {

Int pick(std::mt19937& rng, Int lo, Int hi) {
  return lo + static_cast<Int>(rng() % static_cast<unsigned>(hi - lo + 1));
}

// Candidate contact exponents compatible with one branch's grid: lattice
// points at every depth plus the characteristic exponents themselves.
std::set<Rat> contact_menu(const CharSequence& c) {
  std::set<Rat> menu;
  Rat top = Rat(1);
  for (Int b : c.betas) top = std::max(top, Rat(b, c.n));
  top += Rat(2);
  for (size_t depth = 0; depth <= c.betas.size(); ++depth) {
    Rat step(c.e[depth], c.n);
    Rat lo = depth == 0 ? Rat(1) : Rat(c.betas[depth - 1], c.n);
    for (Rat v = step * Rat((lo / step).ceil()); v <= top; v += step)
      if (v >= Rat(1)) menu.insert(v);
  }
  for (Int b : c.betas) menu.insert(Rat(b, c.n));
  return menu;
}

}  // namespace

BranchSpec random_branch(std::mt19937& rng, const CorpusOptions& opt) {
  Int g = pick(rng, opt.allow_smooth ? 0 : 1, opt.max_pairs);
  std::vector<std::pair<Int, Int>> pairs;
  for (Int i = 0; i < g; ++i) {
    // The first pair needs q_1 > n_1, so its denominator stays below the cap.
    Int den_hi = std::min(opt.max_den, i == 0 ? opt.max_entry - 1 : opt.max_entry);
    Int n = pick(rng, 2, den_hi);
    Int q = 0;
    do {
      q = pick(rng, i == 0 ? n + 1 : 1, opt.max_entry);
    } while (gcd_int(q, n) != 1);
    pairs.emplace_back(q, n);
  }
  PuiseuxPairs p;
  p.pairs = std::move(pairs);
  BranchSpec b;
  b.invariants = pairs_to_chars(p);
  b.power = pick(rng, 1, opt.max_power);
  return b;
}

CurveSpec random_curve(std::mt19937& rng, const CorpusOptions& opt) {
  for (int attempt = 0; attempt < 300; ++attempt) {
    Int nb = pick(rng, 1, opt.max_branches);
    std::vector<BranchSpec> branches;
    for (Int b = 0; b < nb; ++b) branches.push_back(random_branch(rng, opt));
    if (nb == 1) return single_branch_curve(branches[0]);

    std::vector<std::vector<std::optional<Rat>>> contacts(
        static_cast<size_t>(nb), std::vector<std::optional<Rat>>(static_cast<size_t>(nb)));
    bool ok = true;
    for (Int a = 0; a < nb && ok; ++a)
      for (Int b = a + 1; b < nb && ok; ++b) {
        auto menu_a = contact_menu(branches[static_cast<size_t>(a)].invariants);
        auto menu_b = contact_menu(branches[static_cast<size_t>(b)].invariants);
        std::vector<Rat> joint(menu_a.begin(), menu_a.end());
        joint.insert(joint.end(), menu_b.begin(), menu_b.end());
        std::vector<Rat> valid;
        for (const Rat& r : joint) {
          try {
            validate_contact(branches[static_cast<size_t>(a)].invariants,
                             branches[static_cast<size_t>(b)].invariants, r);
            valid.push_back(r);
          } catch (const input_error&) {
          }
        }
        if (valid.empty()) {
          ok = false;
          break;
        }
        std::sort(valid.begin(), valid.end());
        valid.erase(std::unique(valid.begin(), valid.end()), valid.end());
        Rat chosen = valid[static_cast<size_t>(pick(rng, 0, static_cast<Int>(valid.size()) - 1))];
        contacts[static_cast<size_t>(a)][static_cast<size_t>(b)] = chosen;
        contacts[static_cast<size_t>(b)][static_cast<size_t>(a)] = chosen;
      }
    if (!ok) continue;
    try {
      return make_curve_spec(std::move(branches), std::move(contacts));
    } catch (const input_error&) {
      continue;  // ultrametric rejection; resample
    }
  }
  // Transversal smooth fallback is always valid.
  std::vector<BranchSpec> branches{BranchSpec{make_char_sequence(1, {}), 1},
                                   BranchSpec{make_char_sequence(1, {}), 1}};
  std::vector<std::vector<std::optional<Rat>>> contacts(2, std::vector<std::optional<Rat>>(2));
  contacts[0][1] = contacts[1][0] = Rat(1);
  return make_curve_spec(std::move(branches), std::move(contacts));
}

std::vector<CurveSpec> test_corpus_curves(Int count, unsigned seed, const CorpusOptions& opt) {
  std::mt19937 rng(seed);
  std::vector<CurveSpec> out;
  for (Int i = 0; i < count; ++i) out.push_back(random_curve(rng, opt));
  return out;
}

std::vector<BranchSpec> test_corpus_branches(Int count, unsigned seed, const CorpusOptions& opt) {
  std::mt19937 rng(seed);
  std::vector<BranchSpec> out;
  CorpusOptions o = opt;
  o.allow_smooth = false;
  for (Int i = 0; i < count; ++i) out.push_back(random_branch(rng, o));
  return out;
}

}  // namespace toproots
