#include "toproots/forms_residues.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace toproots {

namespace {

std::string fmt_vertex(Int v) { return "E_" + std::to_string(v); }

// Slot-direction of a site relative to a vertex: index into slots, or -1 for
// the vertex's own site.
Int direction_of_site(const DualGraph& g, Int vertex, Int site) {
  const Site& s = g.sites[static_cast<size_t>(site)];
  const auto& slots = g.verts[static_cast<size_t>(vertex)].slots;
  if (!s.is_arrow && s.id == vertex) return -1;
  if (s.is_arrow && g.arrows[static_cast<size_t>(s.id)].host == vertex) {
    for (size_t j = 0; j < slots.size(); ++j)
      if (slots[j].kind == SlotRef::Arrow && slots[j].id == s.id) return static_cast<Int>(j);
    throw internal_error("arrow slot not found at its host");
  }
  Int target = s.is_arrow ? g.arrows[static_cast<size_t>(s.id)].host : s.id;
  for (size_t j = 0; j < slots.size(); ++j) {
    if (slots[j].kind != SlotRef::Vertex) continue;
    auto comp = g.component_without(vertex, slots[j].id);
    if (std::find(comp.begin(), comp.end(), target) != comp.end()) return static_cast<Int>(j);
  }
  throw internal_error("site direction not found");
}

// beta_j of the adjacent-slot linear relations; the arrowhead
// slots carry their multiplicity, zero slots carry 0.
Int slot_beta(const DualGraph& g, Int vertex, const SlotRef& s) {
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  switch (s.kind) {
    case SlotRef::Zero:
      return 0;
    case SlotRef::Arrow:
      return g.arrows[static_cast<size_t>(s.id)].N;
    case SlotRef::Vertex: {
      const auto& vd = g.verts[static_cast<size_t>(vertex)];
      Int farprod = g.far_decoration_product(s.id, vertex);
      const auto& slots = vd.slots;
      if (slots[0].kind == SlotRef::Vertex && slots[0].id == s.id)
        return checked_sub(checked_mul(pr.n_g, g.verts[static_cast<size_t>(s.id)].N),
                           checked_mul(farprod, vd.N));
      if (slots[1].kind == SlotRef::Vertex && slots[1].id == s.id)
        return checked_sub(checked_mul(pr.m_bar_g, g.verts[static_cast<size_t>(s.id)].N),
                           checked_mul(farprod, vd.N));
      return checked_sub(g.verts[static_cast<size_t>(s.id)].N, checked_mul(farprod, vd.N));
    }
  }
  return 0;
}

struct AlphaDecomposition {
  std::vector<Int> alpha;  // one per slot
  Int alpha_self = 0;      // gamma_i when the vertex is a site
};

AlphaDecomposition alpha_decomposition(const DualGraph& g, const FormExponent& w, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  AlphaDecomposition out;
  out.alpha.assign(vd.slots.size(), 0);
  std::vector<Int> dir_sum(vd.slots.size(), 0);
  for (size_t s = 0; s < g.sites.size(); ++s) {
    Int e = w.exponents[s];
    if (e == 0) continue;
    Int dir = direction_of_site(g, vertex, static_cast<Int>(s));
    Int val = checked_mul(e, g.site_val[s][static_cast<size_t>(vertex)]);
    if (dir < 0)
      out.alpha_self = checked_add(out.alpha_self, e);
    else
      dir_sum[static_cast<size_t>(dir)] = checked_add(dir_sum[static_cast<size_t>(dir)], val);
  }
  Int check = checked_mul(out.alpha_self, checked_mul(pr.n_g, pr.m_bar_g));
  for (size_t j = 0; j < vd.slots.size(); ++j) {
    Int divisor = j == 0 ? pr.m_bar_g : (j == 1 ? pr.n_g : checked_mul(pr.n_g, pr.m_bar_g));
    require_internal(dir_sum[j] % divisor == 0,
                     "direction sum not divisible in the alpha decomposition at " +
                         fmt_vertex(vertex));
    out.alpha[j] = dir_sum[j] / divisor;
    check = checked_add(check, dir_sum[j]);
  }
  require_internal(check == form_valuation(g, w, vertex),
                   "alpha decomposition does not reassemble v_i(g)");
  return out;
}

}  // namespace

Int form_valuation(const DualGraph& g, const FormExponent& w, Int vertex) {
  require_internal(w.exponents.size() == g.sites.size(), "form does not match the graph's sites");
  Int total = 0;
  for (size_t s = 0; s < g.sites.size(); ++s)
    total = checked_add(total, checked_mul(w.exponents[s], g.site_val[s][static_cast<size_t>(vertex)]));
  return total;
}

Rat sigma(const DualGraph& g, const FormExponent& w, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  return Rat(-(vd.k + form_valuation(g, w, vertex)), vd.N);
}

ResidueVector residues(const DualGraph& g, const FormExponent& w, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  ResidueVector out;
  out.sigma_value = sigma(g, w, vertex);
  Int self_site = g.site_of_vertex(vertex);
  out.delta = self_site >= 0 ? w.exponents[static_cast<size_t>(self_site)] : 0;
  for (const SlotRef& s : vd.slots) {
    if (s.is_zero()) {
      out.eps.push_back(Rat(1));
      continue;
    }
    auto [N, k] = g.slot_Nk(s);
    Int v_slot = 0;
    for (size_t si = 0; si < g.sites.size(); ++si)
      if (w.exponents[si] != 0)
        v_slot = checked_add(v_slot,
                             checked_mul(w.exponents[si], g.slot_site_val(s, static_cast<Int>(si))));
    out.eps.push_back(Rat(N) * out.sigma_value + Rat(checked_add(k, v_slot)));
  }
  // The residues and the extra-divisor multiplicities sum to m_i - 2,
  // exactly (adjunction on the resolution surface).
  Rat total(out.delta);
  for (const Rat& e : out.eps) total += e;
  require_internal(total == Rat(static_cast<Int>(vd.slots.size()) - 2),
                   "residue-sum identity fails at " + fmt_vertex(vertex));
  return out;
}

ResidueVector residues_closed_form(const DualGraph& g, const FormExponent& w, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  auto ad = alpha_decomposition(g, w, vertex);
  ResidueVector out;
  out.sigma_value = sigma(g, w, vertex);
  out.delta = ad.alpha_self;
  Rat s = out.sigma_value;
  for (size_t j = 0; j < vd.slots.size(); ++j) {
    const SlotRef& sl = vd.slots[j];
    if (sl.is_zero()) {
      out.eps.push_back(Rat(1));
      continue;
    }
    Int beta = slot_beta(g, vertex, sl);
    if (j == 0) {
      out.eps.push_back((Rat(ad.alpha[0] + 1) + Rat(beta) * s) / Rat(pr.n_g));
    } else if (j == 1) {
      require_internal((vd.k - pr.m_bar_g) % pr.n_g == 0,
                       "(k_i - m-bar_g)/n_g is not integral at " + fmt_vertex(vertex));
      Int offset = (vd.k - pr.m_bar_g) / pr.n_g;
      out.eps.push_back((Rat(checked_add(ad.alpha[1], offset)) + Rat(beta) * s) / Rat(pr.m_bar_g));
    } else {
      out.eps.push_back(Rat(ad.alpha[j] + 1) + Rat(beta) * s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization to the bounded residue pattern
// ---------------------------------------------------------------------------

namespace {

// One site per maximal contact value beta-bar_k of the valuation at `vertex`,
// positioned as in the constructive proof: the top element toward E_{i_1}
// when that divisor exists, the rest toward E_{i_2}.
std::vector<Int> max_contact_sites(const DualGraph& g, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  Int gens = static_cast<Int>(pr.sg.generators.size());
  std::vector<Int> out(static_cast<size_t>(gens), -1);
  bool has_i1 = !vd.slots[0].is_zero();
  for (Int k = 0; k < gens; ++k) {
    // Extended generators (division count 1) never appear in a bounded
    // representation; no site needed.
    if (k >= 1 && pr.sg.nn[static_cast<size_t>(k)] == 1) continue;
    Int want = pr.sg.generators[static_cast<size_t>(k)];
    bool want_dir1 = has_i1 && k == gens - 1;
    for (size_t s = 0; s < g.sites.size(); ++s) {
      if (g.site_val[s][static_cast<size_t>(vertex)] != want) continue;
      if (!g.sites[s].is_arrow && g.sites[s].id == vertex) continue;
      Int dir = direction_of_site(g, vertex, static_cast<Int>(s));
      if (vertex == g.root || (want_dir1 ? dir == 0 : dir == 1)) {
        out[static_cast<size_t>(k)] = static_cast<Int>(s);
        break;
      }
    }
    require_internal(out[static_cast<size_t>(k)] >= 0,
                     "no maximal contact site for generator " + std::to_string(want) + " at " +
                         fmt_vertex(vertex));
  }
  return out;
}

// Sites carrying the value n_g m-bar_g at the vertex (the f_i elements of
// the constructive proof); the vertex's own curvette comes first.
std::vector<Int> value_NC_sites(const DualGraph& g, Int vertex) {
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  Int want = checked_mul(pr.n_g, pr.m_bar_g);
  std::vector<Int> out;
  Int self_site = g.site_of_vertex(vertex);
  if (self_site >= 0) out.push_back(self_site);
  for (size_t s = 0; s < g.sites.size(); ++s) {
    if (static_cast<Int>(s) == self_site) continue;
    if (g.site_val[s][static_cast<size_t>(vertex)] == want) out.push_back(static_cast<Int>(s));
  }
  return out;
}

// The bounded residue pattern with its exception rules (+1 only toward
// arrowless components, -1 only at low valency or the satellite triple
// with both inner residues 1); empty result means the pattern holds.
std::string residue_pattern_violation(const DualGraph& g, const FormExponent& w, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  Int r = g.r_of(vertex);
  auto R = residues(g, w, vertex);
  for (size_t j = 0; j < vd.slots.size(); ++j) {
    const Rat& e = R.eps[j];
    if (!(e >= Rat(-1) && e <= Rat(1))) return "residue bounds fail after normalization at " + fmt_vertex(vertex);
    if (e == Rat(1) && !vd.slots[j].is_zero()) {
      if (j > 1) return "eps = 1 on an outer slot at " + fmt_vertex(vertex);
      bool arrows_there = false;
      if (vd.slots[j].kind == SlotRef::Vertex)
        for (Int u : g.component_without(vertex, vd.slots[j].id))
          arrows_there |= !g.verts[static_cast<size_t>(u)].arrows.empty();
      if (arrows_there) return "eps = 1 with arrowheads in the component at " + fmt_vertex(vertex);
    }
    if (e == Rat(-1)) {
      bool allowed = r <= 2;
      if (!allowed && j >= 2 && r == 3 && vd.satellite)
        allowed = R.eps[0] == Rat(1) && R.eps[1] == Rat(1);
      if (!allowed) return "eps = -1 outside the exceptional configurations at " + fmt_vertex(vertex);
    }
  }
  return {};
}

}  // namespace

// Searches the form model for a representation of v at `vertex` whose
// residue vector satisfies the bounded pattern. The residues depend only
// on the per-direction masses (closed formulas), and the bounds confine each
// direction to a handful of candidate masses, so the search is small.
// strict_chain additionally forbids eps = -1 (the admissible-chain bound
// -1 < eps). With `frozen` and `protected_slot`, the exponents of all sites
// in that direction are kept verbatim and only the other directions are
// searched; the per-direction proportionality of site valuations makes this
// preserve every valuation on the protected side.
std::optional<FormExponent> balanced_form_search(const DualGraph& g, Int vertex, Int v,
                                                 const FormExponent* frozen = nullptr,
                                                 Int protected_slot = -1,
                                                 bool strict_chain = false) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  size_t nslots = vd.slots.size();
  // Directions: one per slot, plus the vertex's own site at index nslots.
  std::vector<std::vector<std::pair<Int, size_t>>> dir_sites(nslots + 1);
  for (size_t s = 0; s < g.sites.size(); ++s) {
    Int val = g.site_val[s][static_cast<size_t>(vertex)];
    if (val <= 0) continue;
    Int dir = direction_of_site(g, vertex, static_cast<Int>(s));
    size_t slot = dir < 0 ? nslots : static_cast<size_t>(dir);
    dir_sites[slot].emplace_back(val, s);
  }
  // Exponents frozen in the protected direction.
  FormExponent base = FormExponent::zero(g);
  Int frozen_mass = 0;
  if (frozen != nullptr && protected_slot >= 0) {
    for (auto& [val, s] : dir_sites[static_cast<size_t>(protected_slot)]) {
      base.exponents[s] = frozen->exponents[s];
      frozen_mass = checked_add(frozen_mass, checked_mul(frozen->exponents[s], val));
    }
    require_internal(frozen_mass <= v, "frozen direction mass exceeds the target value");
  }

  // Reachable masses per direction, with a trace for materializing.
  std::vector<std::vector<Int>> from(nslots + 1);
  auto reach_of = [&](size_t d) {
    std::vector<Int>& fr = from[d];
    fr.assign(static_cast<size_t>(v) + 1, -1);
    fr[0] = -2;  // reachable, no predecessor
    for (size_t idx = 0; idx < dir_sites[d].size(); ++idx) {
      Int val = dir_sites[d][idx].first;
      for (Int x = val; x <= v; ++x)
        if (fr[static_cast<size_t>(x)] == -1 && fr[static_cast<size_t>(x - val)] != -1)
          fr[static_cast<size_t>(x)] = static_cast<Int>(idx);
    }
  };
  for (size_t d = 0; d <= nslots; ++d) reach_of(d);

  // Candidate masses per direction: all reachable values (the caller's
  // budget comes from the bound intervals; directions with many reachable
  // values are pruned by the residue bounds below).
  std::optional<FormExponent> found;
  std::vector<Int> mass(nslots + 1, 0);
  Int nodes = 0;
  std::function<void(size_t, Int)> rec = [&](size_t d, Int remaining) {
    if (found || ++nodes > 2000000) return;
    if (d == nslots + 1) {
      if (remaining != 0) return;
      FormExponent cand = base;
      for (size_t dd = 0; dd <= nslots; ++dd) {
        if (protected_slot >= 0 && dd == static_cast<size_t>(protected_slot)) continue;
        Int x = mass[dd];
        while (x > 0) {
          Int idx = from[dd][static_cast<size_t>(x)];
          require_internal(idx >= 0, "direction mass trace failed");
          cand.exponents[dir_sites[dd][static_cast<size_t>(idx)].second] += 1;
          x -= dir_sites[dd][static_cast<size_t>(idx)].first;
        }
      }
      if (form_valuation(g, cand, vertex) != v) return;
      std::string why = residue_pattern_violation(g, cand, vertex);
      if (!why.empty()) return;
      if (strict_chain) {
        auto R = residues(g, cand, vertex);
        for (const Rat& e : R.eps)
          if (e == Rat(-1)) return;
      }
      found = cand;
      return;
    }
    // Bound interval for this slot from the closed formulas.
    Rat sig = Rat(-(vd.k + v), vd.N);
    const auto& pr = g.profile[static_cast<size_t>(vertex)];
    Int unit = 1;
    Rat lo(0), hi(0);
    bool constrained = true;
    if (d < nslots) {
      const SlotRef& sl = vd.slots[d];
      if (sl.is_zero()) {
        if (!dir_sites[d].empty()) require_internal(false, "sites in a zero direction");
        constrained = false;
      } else {
        Int beta = slot_beta(g, vertex, sl);
        if (d == 0) {
          unit = pr.m_bar_g;
          // eps = (alpha + 1 + beta sigma)/n_g in [-1, 1]
          lo = Rat(-pr.n_g - 1) - Rat(beta) * sig;
          hi = Rat(pr.n_g - 1) - Rat(beta) * sig;
        } else if (d == 1) {
          unit = pr.n_g;
          Int offset = (vd.k - pr.m_bar_g) / pr.n_g;
          lo = Rat(-pr.m_bar_g - offset) - Rat(beta) * sig;
          hi = Rat(pr.m_bar_g - offset) - Rat(beta) * sig;
        } else {
          unit = checked_mul(pr.n_g, pr.m_bar_g);
          lo = Rat(-2) - Rat(beta) * sig;
          hi = Rat(0) - Rat(beta) * sig;
        }
      }
    } else {
      constrained = false;  // the self direction absorbs the remainder
    }
    if (protected_slot >= 0 && d == static_cast<size_t>(protected_slot)) {
      if (frozen_mass <= remaining) {
        mass[d] = frozen_mass;
        rec(d + 1, remaining - frozen_mass);
      }
      return;
    }
    Int max_mass = remaining;
    for (Int m = 0; m <= max_mass; ++m) {
      if (from[d][static_cast<size_t>(m)] == -1) continue;
      if (constrained) {
        if (m % unit != 0) continue;
        Rat alpha(m / unit);
        if (alpha < lo || alpha > hi) continue;
      }
      mass[d] = m;
      rec(d + 1, remaining - m);
      if (found) return;
    }
    mass[d] = 0;
  };
  rec(0, v);
  return found;
}

FormExponent normalize_residues(const DualGraph& g, const FormExponent& w, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  Int r = g.r_of(vertex);
  Int v = form_valuation(g, w, vertex);
  Rat sig = sigma(g, w, vertex);
  auto mc = max_contact_sites(g, vertex);
  auto pool = value_NC_sites(g, vertex);
  Int self_site = g.site_of_vertex(vertex);
  bool has_dir1 = !vd.slots[0].is_zero();
  Int g_idx = static_cast<Int>(pr.sg.generators.size()) - 1;
  // With an extended last generator the alpha_1 bookkeeping is empty.
  bool top_usable = g_idx >= 1 && pr.sg.nn[static_cast<size_t>(g_idx)] > 1;

  // Rewrite g over maximal contact elements of v_i; v_i(g) and sigma_i are
  // preserved and the bounded representation pins alpha_1 < n_g.
  FormExponent cur = FormExponent::zero(g);
  {
    auto rep = bounded_representation(pr.sg, v);
    for (size_t k = 0; k < rep.size(); ++k) {
      if (rep[k] == 0) continue;
      require_internal(mc[k] >= 0, "bounded representation used a generator without a site");
      cur.exponents[static_cast<size_t>(mc[k])] += rep[k];
    }
    require_internal(form_valuation(g, cur, vertex) == v, "maximal-contact rewrite changed v_i");
  }

  // The lower-bound loop advances alpha_1 by n_g per pass and alpha_1 m-bar_g
  // never exceeds v, so v/(n_g m-bar_g) + slack passes suffice.
  Int guard = v / std::max<Int>(checked_mul(pr.n_g, pr.m_bar_g), 1) + pr.curvette.g() +
              static_cast<Int>(vd.slots.size()) + 8;
  auto alpha1 = [&]() -> Int {
    return (has_dir1 && top_usable) ? cur.exponents[static_cast<size_t>(mc[static_cast<size_t>(g_idx)])]
                                    : 0;
  };

  // Lower-bound passes for eps_{i_1}: each pass raises it by one; at
  // rupture vertices the bound is strict, so eps = -1 is stepped over too.
  for (Int iter = 0;; ++iter) {
    require_internal(iter <= guard, "lower-bound loop did not terminate");
    if (!has_dir1 || !top_usable) break;
    auto R = residues(g, cur, vertex);
    if (R.eps[0] > Rat(-1) || (R.eps[0] == Rat(-1) && r < 3)) break;
    Int a1 = alpha1();
    Int t = v - (a1 + 1) * pr.m_bar_g;
    require_internal(t >= 0, "lower-bound step with negative remainder");
    auto rep = bounded_representation(pr.sg, t);
    require_internal(rep.back() == pr.n_g - 1, "gamma_g != n_g - 1 in the lower-bound step");
    FormExponent next = FormExponent::zero(g);
    for (Int k = 0; k < g_idx; ++k)
      if (rep[static_cast<size_t>(k)] != 0)
        next.exponents[static_cast<size_t>(mc[static_cast<size_t>(k)])] += rep[static_cast<size_t>(k)];
    next.exponents[static_cast<size_t>(mc[static_cast<size_t>(g_idx)])] = a1 + pr.n_g;
    require_internal(form_valuation(g, next, vertex) == v, "lower-bound step changed v_i(g)");
    cur = next;
  }

  if (r >= 3) {
    require_internal(self_site >= 0 && !pool.empty() && pool[0] == self_site,
                     "rupture vertex is not a site");
    // Upper-bound pass for eps_{i_2}: move n_g m-bar_g blocks onto the
    // curvette at the vertex itself. An exact value 1 with arrowheads in the
    // component also steps down (the strict-bound clause).
    auto arrows_in_slot = [&](size_t j) {
      bool arrows_there = false;
      if (vd.slots[j].kind == SlotRef::Vertex)
        for (Int u : g.component_without(vertex, vd.slots[j].id))
          arrows_there |= !g.verts[static_cast<size_t>(u)].arrows.empty();
      if (vd.slots[j].kind == SlotRef::Arrow) arrows_there = true;
      return arrows_there;
    };
    auto R = residues(g, cur, vertex);
    if (R.eps[1] > Rat(1) || (R.eps[1] == Rat(1) && arrows_in_slot(1))) {
      Int gamma;
      if (R.eps[1] == Rat(1))
        gamma = 1;
      else
        gamma = R.eps[1].is_integer() ? R.eps[1].num - 1 : R.eps[1].floor();
      require_internal(gamma >= 1, "upper-bound step with nothing to move");
      Int a1 = alpha1();
      Int t = v - (a1 + 1) * pr.m_bar_g - pr.n_g * pr.m_bar_g * (gamma - 1);
      require_internal(t >= 0, "upper-bound step with negative remainder");
      auto rep = bounded_representation(pr.sg, t);
      require_internal(rep.back() == (top_usable ? pr.n_g - 1 : 0),
                       "gamma_g mismatch in the upper step");
      FormExponent next = FormExponent::zero(g);
      for (Int k = 0; k < g_idx; ++k)
        if (rep[static_cast<size_t>(k)] != 0)
          next.exponents[static_cast<size_t>(mc[static_cast<size_t>(k)])] +=
              rep[static_cast<size_t>(k)];
      if (has_dir1 && top_usable)
        next.exponents[static_cast<size_t>(mc[static_cast<size_t>(g_idx)])] = a1;
      next.exponents[static_cast<size_t>(self_site)] += gamma;
      require_internal(form_valuation(g, next, vertex) == v, "upper-bound step changed v_i(g)");
      cur = next;
    }
    R = residues(g, cur, vertex);
    if (has_dir1 && top_usable &&
        (R.eps[0] > Rat(1) || (R.eps[0] == Rat(1) && arrows_in_slot(0)))) {
      Int a1 = alpha1();
      require_internal(a1 >= pr.n_g, "eps_{i_1} beyond bound without alpha_1 >= n_g");
      cur.exponents[static_cast<size_t>(mc[static_cast<size_t>(g_idx)])] = a1 % pr.n_g;
      cur.exponents[static_cast<size_t>(self_site)] += a1 / pr.n_g;
      require_internal(form_valuation(g, cur, vertex) == v, "mod step changed v_i(g)");
    }

    // Outer-slot passes: raise outer residues by trading curvette factors at E_i for
    // curvettes of the same valuation in the affected direction.
    for (Int iter = 0;; ++iter) {
      require_internal(iter <= guard + v, "outer-slot loop did not terminate");
      auto RR = residues(g, cur, vertex);
      Int bad = -1;
      for (size_t j = 2; j < vd.slots.size(); ++j)
        if (RR.eps[j] <= Rat(-1)) bad = static_cast<Int>(j);
      if (bad < 0) break;
      if (cur.exponents[static_cast<size_t>(self_site)] == 0) break;  // the exceptional -1 configuration, checked below
      Int swap_site = -1;
      for (Int s : pool)
        if (s != self_site && direction_of_site(g, vertex, s) == bad) {
          swap_site = s;
          break;
        }
      require_internal(swap_site >= 0,
                       "no curvette with value n_g m-bar_g in the direction of slot " +
                           std::to_string(bad) + " at " + fmt_vertex(vertex));
      cur.exponents[static_cast<size_t>(self_site)] -= 1;
      cur.exponents[static_cast<size_t>(swap_site)] += 1;
    }
  }

  require_internal(sigma(g, cur, vertex) == sig, "normalization changed sigma_i");
  std::string violation = residue_pattern_violation(g, cur, vertex);
  if (violation.empty()) return cur;

  // Low-valency vertices (a two-slot root, dead ends with deep forms) fall
  // outside the surgical moves above; search the direction masses for a
  // bounded representation.
  auto found = balanced_form_search(g, vertex, v);
  require_internal(found.has_value(), violation + " (no bounded representation found)");
  require_internal(sigma(g, *found, vertex) == sig, "normalization changed sigma_i");
  return *found;
}

// ---------------------------------------------------------------------------
// curvette-power detection and zero achievability
// ---------------------------------------------------------------------------

std::optional<Int> curvette_power_ratio(const DualGraph& g, Int vertex) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  if (!vd.satellite || g.r_of(vertex) != 3) return std::nullopt;
  Int NC = checked_mul(pr.n_g, pr.m_bar_g);
  if (vd.N % NC != 0) return std::nullopt;
  Int lambda = vd.N / NC;
  // Equivalent to both inner linear-relation remainders vanishing;
  // cross-checked against the lambda pattern on curvette multiplicities.
  if (slot_beta(g, vertex, vd.slots[0]) != 0 || slot_beta(g, vertex, vd.slots[1]) != 0)
    return std::nullopt;
  for (int j = 0; j < 2; ++j) {
    const SlotRef& s = vd.slots[static_cast<size_t>(j)];
    if (s.kind != SlotRef::Vertex) continue;
    Int NCj = valuation_of_element(g, Site{false, vertex}, s.id);
    require_internal(g.verts[static_cast<size_t>(s.id)].N == checked_mul(lambda, NCj),
                     "beta_j = 0 but the lambda pattern fails");
  }
  return lambda;
}

bool curvette_power_case(const DualGraph& g, Int vertex) { return curvette_power_ratio(g, vertex).has_value(); }

bool zero_achievable(const DualGraph& g, Int vertex, Int v, Int slot) {
  require_input(g.is_rupture(vertex), "NotRupture");
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  require_input(v >= 0 && v < vd.N, "NotAttainable");
  require_input(slot >= 0 && slot < static_cast<Int>(vd.slots.size()), "bad slot");
  const SlotRef& s = vd.slots[static_cast<size_t>(slot)];
  if (s.is_zero()) return false;
  Rat sig = Rat(-(vd.k + v), vd.N);
  Int beta = slot_beta(g, vertex, s);
  if (slot >= 2) {
    // eps = alpha_j + 1 + beta_j sigma with alpha_j free in Z_{>=0}:
    // integrality needs beta sigma in Z, the zero needs alpha = -1 - beta
    // sigma >= 0, and the curvette-power pattern blocks it entirely.
    if (!(Rat(beta) * sig).is_integer()) return false;
    if (Rat(beta) * sig > Rat(-1)) return false;
    return !curvette_power_case(g, vertex);
  }
  if (beta == 0) return false;  // no arrowheads in that component
  if (slot == 0) {
    // alpha_1 is pinned mod n_g by v since gcd(m-bar_g, n_g) = 1.
    Int a1 = (v % pr.n_g) * mod_inverse(pr.m_bar_g, pr.n_g) % pr.n_g;
    Rat val = (Rat(a1 + 1) + Rat(beta) * sig) / Rat(pr.n_g);
    return val.frac() == Rat(0);
  }
  require_internal((vd.k - pr.m_bar_g) % pr.n_g == 0, "slot-2 offset not integral");
  Int offset = (vd.k - pr.m_bar_g) / pr.n_g;
  Int a2 = (v % pr.m_bar_g) * mod_inverse(pr.n_g, pr.m_bar_g) % pr.m_bar_g;
  Rat val = (Rat(checked_add(a2, offset)) + Rat(beta) * sig) / Rat(pr.m_bar_g);
  return val.frac() == Rat(0);
}

// Form-independent per-slot integrality of the residue numbers at the given
// value (the fractional classes of the closed formulas).
bool residue_integral_class(const DualGraph& g, Int vertex, Int v, Int slot) {
  const auto& vd = g.verts[static_cast<size_t>(vertex)];
  const auto& pr = g.profile[static_cast<size_t>(vertex)];
  const SlotRef& s = vd.slots[static_cast<size_t>(slot)];
  if (s.is_zero()) return true;
  Rat sig = Rat(-(vd.k + v), vd.N);
  Int beta = slot_beta(g, vertex, s);
  if (slot >= 2) return (Rat(beta) * sig).is_integer();
  if (slot == 0) {
    Int a1 = (v % pr.n_g) * mod_inverse(pr.m_bar_g, pr.n_g) % pr.n_g;
    return ((Rat(a1 + 1) + Rat(beta) * sig) / Rat(pr.n_g)).frac() == Rat(0);
  }
  Int offset = (vd.k - pr.m_bar_g) / pr.n_g;
  Int a2 = (v % pr.m_bar_g) * mod_inverse(pr.n_g, pr.m_bar_g) % pr.m_bar_g;
  return ((Rat(checked_add(a2, offset)) + Rat(beta) * sig) / Rat(pr.m_bar_g)).frac() == Rat(0);
}

std::optional<FormExponent> zero_witness_search(const DualGraph& g, Int vertex, Int v, Int slot,
                                                Int degree_bound) {
  std::optional<FormExponent> found;
  FormExponent w = FormExponent::zero(g);
  std::function<void(size_t, Int)> rec = [&](size_t site, Int remaining) {
    if (found) return;
    if (remaining == 0) {
      auto R = residues(g, w, vertex);
      if (R.eps[static_cast<size_t>(slot)] == Rat(0)) found = w;
      return;
    }
    if (site >= g.sites.size()) return;
    Int val = g.site_val[site][static_cast<size_t>(vertex)];
    rec(site + 1, remaining);
    if (found) return;
    if (val > 0) {
      for (Int e = 1; e <= degree_bound && e * val <= remaining; ++e) {
        w.exponents[site] = e;
        rec(site + 1, remaining - e * val);
        if (found) return;
      }
      w.exponents[site] = 0;
    }
  };
  rec(0, v);
  return found;
}

// ---------------------------------------------------------------------------
// Admissible chains
// ---------------------------------------------------------------------------

namespace {

struct ChainCheck {
  bool ok = false;
  std::string why;
};

// Post-hoc soundness check of a chain certificate: sigma constant, bounds
// chain at every path vertex, maximal endpoints.
ChainCheck check_chain(const DualGraph& g, const AdmissibleChain& chain) {
  ChainCheck res;
  if (chain.path.empty()) {
    res.why = "empty path";
    return res;
  }
  for (size_t idx = 0; idx < chain.path.size(); ++idx) {
    Int vtx = chain.path[idx];
    if (sigma(g, chain.witness, vtx) != chain.sigma_value) {
      res.why = "sigma not constant along the chain";
      return res;
    }
    auto R = residues(g, chain.witness, vtx);
    const auto& slots = g.verts[static_cast<size_t>(vtx)].slots;
    for (size_t j = 0; j < slots.size(); ++j) {
      if (!(R.eps[j] > Rat(-1) && R.eps[j] <= Rat(1))) {
        res.why = "residue bounds chain fail on the chain at " + fmt_vertex(vtx);
        return res;
      }
      if (R.eps[j] == Rat(1) && !slots[j].is_zero()) {
        bool arrows_there = false;
        if (slots[j].kind == SlotRef::Vertex)
          for (Int u : g.component_without(vtx, slots[j].id))
            arrows_there |= !g.verts[static_cast<size_t>(u)].arrows.empty();
        else
          arrows_there = true;
        if (j > 1 || arrows_there) {
          res.why = "eps = 1 in a forbidden position along the chain";
          return res;
        }
      }
    }
    if (idx + 1 < chain.path.size()) {
      Int nxt = chain.path[idx + 1];
      bool vanish = false;
      for (size_t j = 0; j < slots.size(); ++j)
        if (slots[j].kind == SlotRef::Vertex && slots[j].id == nxt && R.eps[j] == Rat(0))
          vanish = true;
      if (!vanish) {
        res.why = "consecutive chain vertices without a vanishing residue";
        return res;
      }
    }
  }
  // Endpoint maximality: no vanishing residues except possibly at the
  // E_{i_2} slot, the path direction, or an arrowhead endpoint.
  for (int end = 0; end < 2; ++end) {
    Int vtx = end == 0 ? chain.path.front() : chain.path.back();
    if (chain.path.size() == 1 && end == 1) break;
    bool endpoint_arrow = false;
    for (Int a : chain.arrow_endpoints)
      if (g.arrows[static_cast<size_t>(a)].host == vtx) endpoint_arrow = true;
    auto R = residues(g, chain.witness, vtx);
    const auto& slots = g.verts[static_cast<size_t>(vtx)].slots;
    Int inward = -1;
    if (chain.path.size() >= 2)
      inward = end == 0 ? chain.path[1] : chain.path[chain.path.size() - 2];
    for (size_t j = 0; j < slots.size(); ++j) {
      if (R.eps[j] != Rat(0)) continue;
      if (j == 1) continue;  // allowed exception at E_{i_2}
      bool on_path = slots[j].kind == SlotRef::Vertex && slots[j].id == inward;
      bool is_arrow_end = slots[j].kind == SlotRef::Arrow && endpoint_arrow;
      if (!on_path && !is_arrow_end) {
        res.why = "endpoint has an unused vanishing residue (chain not maximal)";
        return res;
      }
    }
    if (!endpoint_arrow && !g.is_rupture(vtx)) {
      res.why = "endpoint is neither rupture nor an arrowhead host";
      return res;
    }
  }
  res.ok = true;
  return res;
}

}  // namespace

std::optional<AdmissibleChain> find_maximal_admissible_chain(const DualGraph& g,
                                                             const FormExponent& w, Int vertex) {
  require_input(g.is_rupture(vertex), "NotRupture");
  FormExponent form = normalize_residues(g, w, vertex);
  {
    auto R = residues(g, form, vertex);
    bool has_zero = false;
    for (const Rat& e : R.eps) has_zero |= e == Rat(0);
    if (!has_zero) throw input_error("NoVanishingResidue");
  }
  Rat sig = sigma(g, form, vertex);

  // Greedy walk along vanishing residues (the M(omega) subgraph), refitting
  // the form at every structural vertex entered, with the direction of the
  // already-built part protected. The per-direction proportionality of site
  // valuations keeps every accepted vertex's data intact.
  std::set<Int> accepted{vertex};
  std::map<Int, std::vector<Int>> tree_adj;       // accepted chain edges
  std::map<Int, std::vector<Int>> arrow_ends;     // accepted arrow endpoints
  std::vector<std::pair<Int, Int>> pending;       // (vertex, slot) to extend through
  {
    auto R = residues(g, form, vertex);
    const auto& slots = g.verts[static_cast<size_t>(vertex)].slots;
    for (size_t j = 0; j < slots.size(); ++j)
      if (R.eps[j] == Rat(0)) pending.emplace_back(vertex, static_cast<Int>(j));
  }

  Int guard = 4 * g.n_vertices() + 16;
  while (!pending.empty()) {
    require_internal(--guard > 0, "admissible chain walk did not terminate");
    auto [at, slot] = pending.back();
    pending.pop_back();
    auto R = residues(g, form, at);
    if (R.eps[static_cast<size_t>(slot)] != Rat(0)) continue;  // stale after a refit
    const SlotRef& sl = g.verts[static_cast<size_t>(at)].slots[static_cast<size_t>(slot)];
    if (sl.kind == SlotRef::Arrow) {
      arrow_ends[at].push_back(sl.id);
      continue;
    }
    if (sl.kind != SlotRef::Vertex || accepted.count(sl.id)) continue;
    Int u = sl.id;
    require_internal(sigma(g, form, u) == sig, "vanishing residue without sigma equality");
    if (g.r_of(u) != 2) {
      // Structural vertex: refit so the bounds hold, protecting the arrived
      // direction.
      Int back_slot = -1;
      const auto& uslots = g.verts[static_cast<size_t>(u)].slots;
      for (size_t j = 0; j < uslots.size(); ++j)
        if (uslots[j].kind == SlotRef::Vertex && uslots[j].id == at) back_slot = static_cast<Int>(j);
      require_internal(back_slot >= 0, "chain walk lost its back edge");
      Int target = form_valuation(g, form, u);
      auto refit = balanced_form_search(g, u, target, &form, back_slot, /*strict_chain=*/true);
      if (!refit.has_value())
        return std::nullopt;  // no in-model witness through this vertex
      form = *refit;
      require_internal(sigma(g, form, vertex) == sig, "refit changed sigma at the start vertex");
    }
    accepted.insert(u);
    tree_adj[at].push_back(u);
    tree_adj[u].push_back(at);
    auto RU = residues(g, form, u);
    const auto& uslots = g.verts[static_cast<size_t>(u)].slots;
    for (size_t j = 0; j < uslots.size(); ++j) {
      if (RU.eps[j] != Rat(0)) continue;
      if (uslots[j].kind == SlotRef::Vertex && uslots[j].id == at) continue;
      pending.emplace_back(u, static_cast<Int>(j));
    }
  }

  // Assemble the maximal path through the start vertex: the two longest
  // branches of the accepted tree rooted there.
  std::function<std::vector<Int>(Int, Int)> deepest = [&](Int vtx, Int from) -> std::vector<Int> {
    std::vector<Int> best{vtx};
    for (Int nxt : tree_adj[vtx]) {
      if (nxt == from) continue;
      auto cand = deepest(nxt, vtx);
      // Prefer paths ending in an arrowhead, then longer ones.
      bool cand_arrow = arrow_ends.count(cand.back()) > 0;
      bool best_arrow = best.size() > 1 && arrow_ends.count(best.back()) > 0;
      cand.insert(cand.begin(), vtx);
      if (cand.size() > best.size() || (cand.size() == best.size() && cand_arrow && !best_arrow))
        best = cand;
    }
    return best;
  };
  std::vector<Int> down1 = deepest(vertex, -1);
  std::vector<Int> down2{vertex};
  if (down1.size() >= 2) {
    Int first = down1[1];
    for (Int nxt : tree_adj[vertex]) {
      if (nxt == first) continue;
      auto cand = deepest(nxt, vertex);
      if (cand.size() + 1 > down2.size()) {
        down2 = cand;
        std::reverse(down2.begin(), down2.end());
        down2.push_back(vertex);
      }
    }
  }
  AdmissibleChain chain;
  chain.sigma_value = sig;
  chain.witness = form;
  if (down2.size() > 1) {
    chain.path = down2;
    chain.path.insert(chain.path.end(), down1.begin() + 1, down1.end());
  } else {
    chain.path = down1;
  }
  for (Int vtx : {chain.path.front(), chain.path.back()})
    if (arrow_ends.count(vtx))
      for (Int a : arrow_ends[vtx]) chain.arrow_endpoints.push_back(a);
  std::sort(chain.arrow_endpoints.begin(), chain.arrow_endpoints.end());
  chain.arrow_endpoints.erase(
      std::unique(chain.arrow_endpoints.begin(), chain.arrow_endpoints.end()),
      chain.arrow_endpoints.end());

  auto chk = check_chain(g, chain);
  require_internal(chk.ok, "admissible chain certificate failed its check: " + chk.why);
  return chain;
}

}  // namespace toproots
