#include "toproots/curve_input.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace toproots {

Rat parse_rational(const std::string& text) {
  std::string t = text;
  auto slash = t.find('/');
  try {
    if (slash == std::string::npos) {
      size_t pos = 0;
      Int n = std::stoll(t, &pos);
      require_input(pos == t.size(), "trailing characters in rational: " + text);
      return Rat(n);
    }
    size_t p1 = 0, p2 = 0;
    Int n = std::stoll(t.substr(0, slash), &p1);
    Int d = std::stoll(t.substr(slash + 1), &p2);
    require_input(p1 == slash && p2 == t.size() - slash - 1, "malformed rational: " + text);
    require_input(d != 0, "zero denominator in rational: " + text);
    return Rat(n, d);
  } catch (const std::invalid_argument&) {
    throw input_error("malformed rational: " + text);
  } catch (const std::out_of_range&) {
    throw input_error("rational out of range: " + text);
  }
}

CharSequence make_char_sequence(Int n, std::vector<Int> betas, bool extended) {
  require_input(n >= 1, "multiplicity n must be positive");
  CharSequence c;
  c.n = n;
  c.betas = std::move(betas);
  c.extended = extended;
  if (!c.betas.empty()) {
    if (extended)
      require_input(c.betas.front() >= 1, "beta_1 must be positive");
    else
      require_input(c.betas.front() > n, "beta_1 must exceed n");
    for (size_t i = 1; i < c.betas.size(); ++i)
      require_input(c.betas[i] > c.betas[i - 1], "characteristic exponents must increase");
  }
  c.e.assign(c.betas.size() + 1, 0);
  c.nn.assign(c.betas.size() + 1, 0);
  c.mm.assign(c.betas.size() + 1, 0);
  c.e[0] = n;
  for (size_t i = 1; i <= c.betas.size(); ++i) {
    c.e[i] = gcd_int(c.e[i - 1], c.betas[i - 1]);
    c.nn[i] = c.e[i - 1] / c.e[i];
    c.mm[i] = c.betas[i - 1] / c.e[i];
    if (!extended)
      require_input(c.nn[i] > 1, "n_i = 1 is only allowed in extended sequences");
  }
  if (!c.betas.empty() && !extended)
    require_input(c.e.back() == 1, "gcd(n, beta_1..beta_g) must be 1 for a reduced branch");
  if (c.betas.empty())
    require_input(n == 1 || extended, "a branch with no characteristic exponents must be smooth");
  return c;
}

PuiseuxPairs chars_to_pairs(const CharSequence& c) {
  PuiseuxPairs p;
  p.extended = c.extended;
  Int m_prev = 0;
  for (Int i = 1; i <= c.g(); ++i) {
    Int q = checked_sub(c.mm[i], checked_mul(c.nn[i], m_prev));
    p.pairs.emplace_back(q, c.nn[i]);
    m_prev = c.mm[i];
  }
  return p;
}

CharSequence pairs_to_chars(const PuiseuxPairs& p) {
  Int n = 1;
  for (auto& [q, ni] : p.pairs) {
    require_input(ni >= 1, "pair denominator must be >= 1");
    require_input(gcd_int(q, ni) == 1 || (q == 0 && ni == 1), "pair (q_i, n_i) must be coprime");
    if (!p.extended) require_input(ni > 1, "n_i = 1 is only allowed in extended pair lists");
    n = checked_mul(n, ni);
  }
  if (!p.pairs.empty() && !p.extended)
    require_input(p.pairs.front().first > p.pairs.front().second,
                  "q_1 > n_1 required (beta_1 > n)");
  if (!p.pairs.empty() && p.extended)
    require_input(p.pairs.front().first >= 1, "q_1 >= 1 required");
  for (size_t i = 1; i < p.pairs.size(); ++i)
    require_input(p.pairs[i].first >= 1, "q_i >= 1 required for increasing exponents");

  std::vector<Int> betas;
  Int m_prev = 0;
  Int e = n;
  for (auto& [q, ni] : p.pairs) {
    e /= ni;  // e_i
    Int m = checked_add(q, checked_mul(ni, m_prev));
    betas.push_back(checked_mul(m, e));
    m_prev = m;
  }
  return make_char_sequence(n, std::move(betas), p.extended);
}

NumericalSemigroup pairs_to_semigroup(const PuiseuxPairs& p) {
  CharSequence c = pairs_to_chars(p);
  NumericalSemigroup s;
  s.extended = p.extended;
  s.nn = c.nn;
  s.generators.assign(c.g() + 1, 0);
  s.reduced.assign(c.g() + 1, 0);
  s.generators[0] = c.n;
  s.reduced[0] = 1;
  for (Int i = 1; i <= c.g(); ++i) {
    if (i == 1) {
      s.generators[1] = c.betas[0];
    } else {
      // beta-bar_i = n_{i-1} beta-bar_{i-1} - beta_{i-1} + beta_i
      s.generators[i] = checked_add(
          checked_sub(checked_mul(c.nn[i - 1], s.generators[i - 1]), c.betas[i - 2]),
          c.betas[i - 1]);
    }
    s.reduced[i] = s.generators[i] / c.e[i];
    require_internal(s.reduced[i] * c.e[i] == s.generators[i],
                     "semigroup generator not divisible by e_i");
  }
  if (c.g() == 0) {
    s.conductor = 0;
  } else {
    // c(Gamma) = n_g beta-bar_g - beta_g - (n - 1)
    s.conductor = checked_sub(checked_mul(c.nn[c.g()], s.generators[c.g()]),
                              checked_add(c.betas[c.g() - 1], c.n - 1));
  }
  return s;
}

std::vector<char> semigroup_sieve(const NumericalSemigroup& s, Int bound) {
  std::vector<char> table(static_cast<size_t>(bound) + 1, 0);
  table[0] = 1;
  for (Int gen : s.generators) {
    if (gen == 0) continue;
    for (Int v = gen; v <= bound; ++v)
      if (table[static_cast<size_t>(v - gen)]) table[static_cast<size_t>(v)] = 1;
  }
  return table;
}

bool semigroup_membership(const NumericalSemigroup& s, Int value) {
  require_input(value >= 0, "semigroup membership is defined for non-negative integers");
  if (value >= s.conductor && !s.generators.empty()) {
    // Every integer >= conductor is a member (plane-branch semigroups have
    // gcd 1). Guard against extended generator lists with gcd > 1.
    Int g = 0;
    for (Int gen : s.generators) g = gcd_int(g, gen);
    if (g == 1) return true;
  }
  auto table = semigroup_sieve(s, value);
  return table[static_cast<size_t>(value)] != 0;
}

std::vector<Int> bounded_representation(const NumericalSemigroup& s, Int value) {
  require_input(value >= 0, "NotAMember");
  Int g = s.g();
  // reachable[i] = values representable as sum over generators 0..i with
  // gamma_j < n_j for j in 1..i (gamma_0 unbounded).
  std::vector<std::vector<char>> reachable(static_cast<size_t>(g) + 1);
  {
    std::vector<char> base(static_cast<size_t>(value) + 1, 0);
    Int b0 = s.generators[0];
    for (Int v = 0; v <= value; v += b0) {
      base[static_cast<size_t>(v)] = 1;
      if (b0 == 0) break;
    }
    reachable[0] = std::move(base);
    for (Int i = 1; i <= g; ++i) {
      std::vector<char> cur(static_cast<size_t>(value) + 1, 0);
      for (Int v = 0; v <= value; ++v) {
        if (!reachable[static_cast<size_t>(i - 1)][static_cast<size_t>(v)]) continue;
        for (Int gi = 0; gi < s.nn[i]; ++gi) {
          Int w = v + gi * s.generators[i];
          if (w > value) break;
          cur[static_cast<size_t>(w)] = 1;
        }
      }
      reachable[static_cast<size_t>(i)] = std::move(cur);
    }
  }
  require_input(reachable[static_cast<size_t>(g)][static_cast<size_t>(value)], "NotAMember");

  // Lexicographically minimal (gamma_g, ..., gamma_1): pick the smallest
  // admissible coordinate at each level from the top.
  std::vector<Int> coords(static_cast<size_t>(g) + 1, 0);
  Int rest = value;
  for (Int i = g; i >= 1; --i) {
    for (Int gi = 0; gi < s.nn[i]; ++gi) {
      Int w = rest - gi * s.generators[i];
      if (w < 0) break;
      if (reachable[static_cast<size_t>(i - 1)][static_cast<size_t>(w)]) {
        coords[static_cast<size_t>(i)] = gi;
        rest = w;
        break;
      }
    }
  }
  require_internal(rest % s.generators[0] == 0, "bounded representation failed to close");
  coords[0] = rest / s.generators[0];
  return coords;
}

Int milnor_number_irreducible(const PuiseuxPairs& p) {
  require_input(!p.extended, "Milnor number needs a complete (non-extended) pair list");
  return pairs_to_semigroup(p).conductor;
}

std::vector<Int> multiplicity_sequence(const CharSequence& c) {
  std::vector<Int> seq;
  if (c.smooth()) return {1};
  Int prev_beta = 0;
  for (Int i = 1; i <= c.g(); ++i) {
    Int a = c.betas[static_cast<size_t>(i - 1)] - prev_beta;
    Int b = c.e[static_cast<size_t>(i - 1)];
    // Subtractive Euclid: one emitted value per blow-up.
    while (a > 0 && b > 0) {
      if (a >= b) {
        seq.push_back(b);
        a -= b;
      } else {
        seq.push_back(a);
        b -= a;
      }
    }
    prev_beta = c.betas[static_cast<size_t>(i - 1)];
  }
  return seq;
}

const Rat& CurveSpec::contact(Int a, Int b) const {
  require_internal(a != b, "contact of a branch with itself is undefined");
  const auto& slot = contacts[static_cast<size_t>(a)][static_cast<size_t>(b)];
  require_internal(slot.has_value(), "missing contact entry");
  return *slot;
}

namespace {

// Characteristic exponents of `c` as exact rationals beta_i / n.
std::vector<Rat> exponents_of(const CharSequence& c) {
  std::vector<Rat> xs;
  for (Int b : c.betas) xs.push_back(Rat(b, c.n));
  return xs;
}

// Number of characteristic exponents of `c` strictly below the contact.
Int depth_below(const CharSequence& c, const Rat& contact) {
  Int k = 0;
  for (const Rat& x : exponents_of(c))
    if (x < contact) ++k;
  return k;
}

}  // namespace

void validate_contact(const CharSequence& a, const CharSequence& b, const Rat& contact) {
  require_input(contact >= Rat(1), "contact exponent must be >= 1");
  auto xa = exponents_of(a);
  auto xb = exponents_of(b);
  Int ka = depth_below(a, contact);
  Int kb = depth_below(b, contact);
  require_input(ka == kb, "branches disagree on characteristic exponents below their contact");
  for (Int i = 0; i < ka; ++i)
    require_input(xa[static_cast<size_t>(i)] == xb[static_cast<size_t>(i)],
                  "characteristic exponents below the contact must coincide");
  // The contact must sit on the shared exponent lattice at depth k, or be
  // the next characteristic exponent of one of the two branches.
  Rat lattice_step(a.e[static_cast<size_t>(ka)], a.n);  // e_k / n, equal for both sides
  bool on_lattice = (contact / lattice_step).is_integer();
  bool is_next_a = ka < a.g() && contact == xa[static_cast<size_t>(ka)];
  bool is_next_b = kb < b.g() && contact == xb[static_cast<size_t>(kb)];
  require_input(on_lattice || is_next_a || is_next_b,
                "contact exponent " + contact.str() + " lies on neither branch's exponent grid");
  if (ka < a.g())
    require_input(contact <= xa[static_cast<size_t>(ka)], "contact skips a characteristic exponent");
  if (kb < b.g())
    require_input(contact <= xb[static_cast<size_t>(kb)], "contact skips a characteristic exponent");
}

Int intersection_multiplicity(const CharSequence& a, const CharSequence& b, const Rat& contact) {
  validate_contact(a, b, contact);
  // (A.B) = n_A ( sum_{x_i^B < c} (e_{i-1}^B - e_i^B) x_i^B + e_k^B c ).
  Rat total(0);
  Int k = depth_below(b, contact);
  for (Int i = 1; i <= k; ++i) {
    Rat xi(b.betas[static_cast<size_t>(i - 1)], b.n);
    total += Rat(b.e[static_cast<size_t>(i - 1)] - b.e[static_cast<size_t>(i)]) * xi;
  }
  total += Rat(b.e[static_cast<size_t>(k)]) * contact;
  total *= Rat(a.n);
  require_internal(total.is_integer(), "intersection multiplicity must be an integer");
  Int via_b = total.num;

  // Same computation from the other side; Noether symmetry is a hard check.
  Rat total2(0);
  Int k2 = depth_below(a, contact);
  for (Int i = 1; i <= k2; ++i) {
    Rat xi(a.betas[static_cast<size_t>(i - 1)], a.n);
    total2 += Rat(a.e[static_cast<size_t>(i - 1)] - a.e[static_cast<size_t>(i)]) * xi;
  }
  total2 += Rat(a.e[static_cast<size_t>(k2)]) * contact;
  total2 *= Rat(b.n);
  require_internal(total2.is_integer() && total2.num == via_b,
                   "intersection multiplicity is not symmetric");
  return via_b;
}

CurveSpec make_curve_spec(std::vector<BranchSpec> branches,
                          std::vector<std::vector<std::optional<Rat>>> contacts) {
  CurveSpec spec;
  require_input(!branches.empty(), "a curve needs at least one branch");
  for (auto& b : branches) require_input(b.power >= 1, "branch power must be >= 1");
  spec.branches = std::move(branches);
  Int n = spec.size();
  if (n == 1) {
    spec.contacts.assign(1, std::vector<std::optional<Rat>>(1));
    return spec;
  }
  require_input(static_cast<Int>(contacts.size()) == n, "contact matrix size mismatch");
  for (auto& row : contacts)
    require_input(static_cast<Int>(row.size()) == n, "contact matrix must be square");
  for (Int i = 0; i < n; ++i)
    for (Int j = 0; j < n; ++j) {
      if (i == j) {
        require_input(!contacts[static_cast<size_t>(i)][static_cast<size_t>(j)].has_value(),
                      "contact diagonal must be empty");
        continue;
      }
      require_input(contacts[static_cast<size_t>(i)][static_cast<size_t>(j)].has_value(),
                    "missing contact exponent between branches");
      require_input(*contacts[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                        *contacts[static_cast<size_t>(j)][static_cast<size_t>(i)],
                    "contact matrix must be symmetric");
    }
  spec.contacts = std::move(contacts);
  for (Int i = 0; i < n; ++i)
    for (Int j = i + 1; j < n; ++j)
      validate_contact(spec.branches[static_cast<size_t>(i)].invariants,
                       spec.branches[static_cast<size_t>(j)].invariants, spec.contact(i, j));
  // Ultrametric: in every triple the minimum contact is attained twice.
  for (Int i = 0; i < n; ++i)
    for (Int j = i + 1; j < n; ++j)
      for (Int k = j + 1; k < n; ++k) {
        Rat cij = spec.contact(i, j), cik = spec.contact(i, k), cjk = spec.contact(j, k);
        Rat m = std::min({cij, cik, cjk});
        int hits = (cij == m) + (cik == m) + (cjk == m);
        require_input(hits >= 2, "IncompatibleContacts: ultrametric inequality fails");
      }
  return spec;
}

CurveSpec single_branch_curve(BranchSpec b) {
  return make_curve_spec({std::move(b)}, {});
}

}  // namespace toproots
