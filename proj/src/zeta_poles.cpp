#include "toproots/zeta_poles.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

namespace toproots {

namespace {

using BigRat = boost::multiprecision::cpp_rational;

BigRat big(const Rat& r) { return BigRat(r.num, r.den); }

std::string big_str(const BigRat& r) {
  auto n = boost::multiprecision::numerator(r);
  auto d = boost::multiprecision::denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

// One additive term of the Denef-Loeser sum: coeff / prod of linear factors
// (N s + k), with at most two factors.
struct ZetaTerm {
  Rat coeff;
  std::vector<std::pair<Int, Int>> factors;  // (N, k)

  BigRat eval(const BigRat& s) const {
    BigRat val(coeff.num, coeff.den);
    for (auto& [N, k] : factors) val /= BigRat(N) * s + BigRat(k);
    return val;
  }
};

std::vector<ZetaTerm> zeta_terms(const DualGraph& g) {
  std::vector<ZetaTerm> terms;
  auto Nk = [&](Int v) {
    return std::make_pair(g.verts[static_cast<size_t>(v)].N, g.verts[static_cast<size_t>(v)].k);
  };
  for (Int v = 0; v < g.n_vertices(); ++v) {
    Int chi = 2 - g.r_of(v);
    if (chi != 0) terms.push_back({Rat(chi), {Nk(v)}});
  }
  for (Int v = 0; v < g.n_vertices(); ++v)
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
      if (w > v) terms.push_back({Rat(1), {Nk(v), Nk(w)}});
  for (const auto& a : g.arrows)
    terms.push_back({Rat(1), {Nk(a.host), {a.N, 1}}});
  return terms;
}

}  // namespace

Int RationalFunction::pole_order(const Rat& x) const {
  for (const auto& p : parts)
    if (p.location == x) return p.pole_order;
  return 0;
}

RationalFunction topological_zeta(const DualGraph& g) {
  auto terms = zeta_terms(g);
  std::set<Rat> candidates;
  for (const auto& t : terms)
    for (auto& [N, k] : t.factors) candidates.insert(Rat(-k, N));

  RationalFunction Z;
  std::map<Rat, std::pair<BigRat, BigRat>> laurent;
  for (const Rat& r : candidates) {
    // Exact Laurent data at s = r: writing each factor as N (s - r) + L(r),
    // a term feeds a2 when both factors vanish at r and a1 when exactly one
    // does; terms have at most two factors, so nothing deeper occurs.
    BigRat a1(0), a2(0);
    for (const auto& t : terms) {
      std::vector<Int> vanishing;
      BigRat alive(1);
      for (auto& f : t.factors) {
        BigRat at = BigRat(f.first) * big(r) + BigRat(f.second);
        if (at == 0)
          vanishing.push_back(f.first);
        else
          alive *= at;
      }
      if (vanishing.empty()) continue;
      if (vanishing.size() == 2)
        a2 += big(t.coeff) / (BigRat(vanishing[0]) * BigRat(vanishing[1]));
      else
        a1 += big(t.coeff) / (BigRat(vanishing[0]) * alive);
    }
    if (a1 != 0 || a2 != 0) {
      PrincipalPart part;
      part.location = r;
      part.a1 = big_str(a1);
      part.a2 = big_str(a2);
      part.pole_order = a2 != 0 ? 2 : 1;
      Z.parts.push_back(part);
      laurent[r] = {a1, a2};
    }
  }
  std::sort(Z.parts.begin(), Z.parts.end(),
            [](const PrincipalPart& a, const PrincipalPart& b) { return a.location > b.location; });

  // The principal parts must reproduce the defining sum exactly; this also
  // witnesses that the polynomial part vanishes (Z -> 0 at infinity).
  for (Int probe : {2, 5, 17, 101}) {
    BigRat s(probe, 3);
    BigRat direct(0);
    for (const auto& t : terms) direct += t.eval(s);
    BigRat from_parts(0);
    for (auto& [loc, coeffs] : laurent) {
      BigRat d = s - big(loc);
      from_parts += coeffs.first / d + coeffs.second / (d * d);
    }
    require_internal(direct == from_parts, "principal parts do not reproduce the zeta function");
  }
  return Z;
}

std::vector<std::pair<Rat, Int>> zeta_poles_exact(const DualGraph& g) {
  RationalFunction Z = topological_zeta(g);
  std::vector<std::pair<Rat, Int>> out;
  for (const auto& p : Z.parts)
    if (p.pole_order > 0) out.emplace_back(p.location, p.pole_order);
  return out;
}

std::vector<PoleEntry> pole_classification(const DualGraph& g) {
  auto ratio_of_vertex = [&](Int v) {
    return Rat(g.verts[static_cast<size_t>(v)].k, g.verts[static_cast<size_t>(v)].N);
  };
  std::map<Rat, PoleEntry> out;

  auto note_pair = [&](const Rat& ratio, Int a, Int b) {
    auto& e = out[-ratio];
    e.location = -ratio;
    e.order = 2;
    e.equal_ratio_pairs.emplace_back(a, b);
  };

  // Adjacent equal-ratio intersections force order-2 poles (vertex-vertex
  // edges and vertex-arrowhead incidences).
  for (Int v = 0; v < g.n_vertices(); ++v) {
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
      if (w > v && ratio_of_vertex(v) == ratio_of_vertex(w)) note_pair(ratio_of_vertex(v), v, w);
    for (Int a : g.verts[static_cast<size_t>(v)].arrows)
      if (ratio_of_vertex(v) == Rat(1, g.arrows[static_cast<size_t>(a)].N))
        note_pair(ratio_of_vertex(v), v, g.n_vertices() + a);
  }
  // Rupture divisors realize order-1 poles.
  for (Int v = 0; v < g.n_vertices(); ++v) {
    if (!g.is_rupture(v)) continue;
    auto& e = out[-ratio_of_vertex(v)];
    e.location = -ratio_of_vertex(v);
    e.order = std::max<Int>(e.order, 1);
    e.rupture_witnesses.push_back(v);
  }
  // Strict-transform factors always contribute a pole at -1/N_a.
  for (Int a = 0; a < g.n_arrows(); ++a) {
    Rat loc(-1, g.arrows[static_cast<size_t>(a)].N);
    auto& e = out[loc];
    e.location = loc;
    e.order = std::max<Int>(e.order, 1);
    e.arrow_witnesses.push_back(a);
  }

  std::vector<PoleEntry> res;
  for (auto& [loc, e] : out) res.push_back(e);
  std::sort(res.begin(), res.end(),
            [](const PoleEntry& a, const PoleEntry& b) { return a.location > b.location; });

  // The two computation paths must agree exactly.
  auto exact = zeta_poles_exact(g);
  require_internal(exact.size() == res.size(),
                   "pole classification disagrees with the rational function (count)");
  for (size_t i = 0; i < exact.size(); ++i)
    require_internal(exact[i].first == res[i].location && exact[i].second == res[i].order,
                     "pole classification disagrees with the rational function at " +
                         exact[i].first.str());
  return res;
}

ZetaContainmentReport check_zeta_containment(const DualGraph& g) {
  return check_zeta_containment(g, topological_roots(g));
}

ZetaContainmentReport check_zeta_containment(const DualGraph& g, const RootMultiset& roots) {
  ZetaContainmentReport rep;
  for (const auto& pole : pole_classification(g)) {
    ZetaMatch m;
    m.location = pole.location;
    m.order = pole.order;
    const RootEntry* e = roots.find(pole.location);
    if (e) {
      m.multiplicity = e->multiplicity;
      m.matched = e->multiplicity >= pole.order;
    }
    rep.pass &= m.matched;
    rep.matches.push_back(m);
  }
  return rep;
}

}  // namespace toproots
