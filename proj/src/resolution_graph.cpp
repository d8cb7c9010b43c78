#include "toproots/resolution_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace toproots {

namespace {

std::string fmt_vertex(Int v) { return "E_" + std::to_string(v); }

// Determinant of the intersection matrix of a subtree, by the classical
// leaf-peeling recursion: det(T_v) = a_v prod det(T_c) - sum_c det(T_c - c)
// prod_{c' != c} det(T_c'). Exact in 64-bit with overflow checks.
struct TreeDet {
  const std::vector<VertexData>& verts;
  const std::set<Int>& allowed;

  // Returns {det(T_v), det(T_v - v)} for the subtree rooted at v, not
  // crossing back through `parent`.
  std::pair<Int, Int> run(Int v, Int parent) const {
    Int det_children = 1;       // prod det(T_c)
    Int sum_term = 0;           // sum_c det(T_c - c) prod_{c' != c} det(T_c')
    std::vector<std::pair<Int, Int>> child_vals;
    std::vector<Int> children;
    for (Int w : verts[static_cast<size_t>(v)].nbrs) {
      if (w == parent || !allowed.count(w)) continue;
      children.push_back(w);
      child_vals.push_back(run(w, v));
    }
    for (auto& cv : child_vals) det_children = checked_mul(det_children, cv.first);
    for (size_t i = 0; i < children.size(); ++i) {
      Int prod_others = 1;
      for (size_t j = 0; j < children.size(); ++j)
        if (j != i) prod_others = checked_mul(prod_others, child_vals[j].first);
      sum_term = checked_add(sum_term, checked_mul(child_vals[i].second, prod_others));
    }
    Int a = verts[static_cast<size_t>(v)].self_int;
    Int det_v = checked_sub(checked_mul(a, det_children), sum_term);
    return {det_v, det_children};
  }
};

Int subtree_determinant(const std::vector<VertexData>& verts, const std::set<Int>& component,
                        Int root_in_component) {
  if (component.empty()) return 1;  // empty product convention
  TreeDet td{verts, component};
  Int d = td.run(root_in_component, -1).first;
  return d < 0 ? -d : d;
}

// ---------------------------------------------------------------------------
// Cluster engine
// ---------------------------------------------------------------------------

struct Cluster {
  // Per cluster point.
  std::vector<std::vector<Int>> prox;
  std::vector<Int> mult;  // multiplicity of the curve (branch powers counted)
  // Per branch: chain of point ids and the branch's own multiplicities there.
  std::vector<std::vector<Int>> chain;
  std::vector<std::vector<Int>> branch_mult;
};

// Greedy Enriques rule: p_j is proximate to p_i iff the multiplicities of
// p_{i+1}..p_j sum to at most mult(p_i). Valid for complete sequences with
// free trailing points.
std::vector<std::vector<Int>> proximity_from_multiplicities(const std::vector<Int>& mu) {
  size_t len = mu.size();
  std::vector<std::vector<Int>> prox(len);
  for (size_t i = 0; i < len; ++i) {
    Int budget = mu[i];
    Int used = 0;
    for (size_t j = i + 1; j < len; ++j) {
      used = checked_add(used, mu[j]);
      if (used > budget) break;
      prox[j].push_back(static_cast<Int>(i));
    }
  }
  for (size_t j = 1; j < len; ++j) {
    bool has_pred = false;
    for (Int q : prox[j]) has_pred |= (q == static_cast<Int>(j - 1));
    require_internal(has_pred, "proximity chain lost its predecessor");
    require_internal(prox[j].size() <= 2, "a point proximate to more than two points");
  }
  return prox;
}

Cluster build_cluster(const CurveSpec& spec) {
  Int nb = spec.size();
  std::vector<std::vector<Int>> mseq(static_cast<size_t>(nb));
  for (Int b = 0; b < nb; ++b)
    mseq[static_cast<size_t>(b)] = multiplicity_sequence(spec.branches[static_cast<size_t>(b)].invariants);

  auto mult_at = [&](Int b, Int j) -> Int {
    const auto& s = mseq[static_cast<size_t>(b)];
    return j < static_cast<Int>(s.size()) ? s[static_cast<size_t>(j)] : 1;
  };

  // Shared point counts via Noether: sum of multiplicity products over the
  // common points equals the intersection multiplicity, exactly.
  std::vector<std::vector<Int>> shared(static_cast<size_t>(nb),
                                       std::vector<Int>(static_cast<size_t>(nb), 0));
  for (Int a = 0; a < nb; ++a)
    for (Int b = a + 1; b < nb; ++b) {
      Int target = intersection_multiplicity(spec.branches[static_cast<size_t>(a)].invariants,
                                             spec.branches[static_cast<size_t>(b)].invariants,
                                             spec.contact(a, b));
      Int acc = 0;
      Int count = 0;
      while (acc < target) {
        acc = checked_add(acc, checked_mul(mult_at(a, count), mult_at(b, count)));
        ++count;
        require_input(count < (1 << 22), "IncompatibleContacts: runaway point sharing");
      }
      require_input(acc == target,
                    "IncompatibleContacts: contact exponent inconsistent with Noether's formula");
      shared[static_cast<size_t>(a)][static_cast<size_t>(b)] = count;
      shared[static_cast<size_t>(b)][static_cast<size_t>(a)] = count;
    }
  for (Int a = 0; a < nb; ++a)
    for (Int b = a + 1; b < nb; ++b)
      for (Int c = b + 1; c < nb; ++c) {
        Int kab = shared[static_cast<size_t>(a)][static_cast<size_t>(b)];
        Int kac = shared[static_cast<size_t>(a)][static_cast<size_t>(c)];
        Int kbc = shared[static_cast<size_t>(b)][static_cast<size_t>(c)];
        Int m = std::min({kab, kac, kbc});
        int hits = (kab == m) + (kac == m) + (kbc == m);
        require_input(hits >= 2, "IncompatibleContacts: shared-point counts are not ultrametric");
      }

  std::vector<Int> length(static_cast<size_t>(nb));
  for (Int b = 0; b < nb; ++b) {
    Int len = std::max<Int>(1, static_cast<Int>(mseq[static_cast<size_t>(b)].size()));
    for (Int a = 0; a < nb; ++a)
      if (a != b) len = std::max(len, shared[static_cast<size_t>(a)][static_cast<size_t>(b)]);
    length[static_cast<size_t>(b)] = len;
  }

  // Identify points positionally: branches a and b share their j-th point
  // iff j < shared(a,b).
  Cluster cl;
  cl.chain.assign(static_cast<size_t>(nb), {});
  cl.branch_mult.assign(static_cast<size_t>(nb), {});
  Int max_len = *std::max_element(length.begin(), length.end());
  for (Int j = 0; j < max_len; ++j) {
    std::vector<Int> live;
    for (Int b = 0; b < nb; ++b)
      if (j < length[static_cast<size_t>(b)]) live.push_back(b);
    std::vector<char> placed(static_cast<size_t>(nb), 0);
    for (Int b : live) {
      if (placed[static_cast<size_t>(b)]) continue;
      std::vector<Int> group{b};
      placed[static_cast<size_t>(b)] = 1;
      for (Int c : live)
        if (!placed[static_cast<size_t>(c)] && j < shared[static_cast<size_t>(b)][static_cast<size_t>(c)]) {
          group.push_back(c);
          placed[static_cast<size_t>(c)] = 1;
        }
      // Sharing must be transitive within the group.
      for (Int x : group)
        for (Int y : group)
          require_internal(x == y || j < shared[static_cast<size_t>(x)][static_cast<size_t>(y)],
                           "point sharing failed transitivity");
      Int pid = static_cast<Int>(cl.mult.size());
      cl.mult.push_back(0);
      cl.prox.emplace_back();
      for (Int m : group) {
        cl.chain[static_cast<size_t>(m)].push_back(pid);
        cl.branch_mult[static_cast<size_t>(m)].push_back(mult_at(m, j));
        cl.mult[static_cast<size_t>(pid)] = checked_add(
            cl.mult[static_cast<size_t>(pid)],
            checked_mul(spec.branches[static_cast<size_t>(m)].power, mult_at(m, j)));
      }
    }
  }

  // Proximity per branch, merged with a consistency check at shared points.
  std::vector<char> prox_known(cl.mult.size(), 0);
  for (Int b = 0; b < nb; ++b) {
    std::vector<Int> mu;
    for (Int j = 0; j < length[static_cast<size_t>(b)]; ++j) mu.push_back(mult_at(b, j));
    auto local = proximity_from_multiplicities(mu);
    for (size_t j = 0; j < local.size(); ++j) {
      Int pid = cl.chain[static_cast<size_t>(b)][j];
      std::vector<Int> mapped;
      for (Int q : local[j]) mapped.push_back(cl.chain[static_cast<size_t>(b)][static_cast<size_t>(q)]);
      std::sort(mapped.begin(), mapped.end());
      if (!prox_known[static_cast<size_t>(pid)]) {
        cl.prox[static_cast<size_t>(pid)] = mapped;
        prox_known[static_cast<size_t>(pid)] = 1;
      } else {
        require_internal(cl.prox[static_cast<size_t>(pid)] == mapped,
                         "branches disagree on the proximity of a shared point");
      }
    }
  }
  return cl;
}

// ---------------------------------------------------------------------------
// Curvette characteristic data from a birth chain
// ---------------------------------------------------------------------------

// Backward Enriques rule: the generic branch through exactly the chain has
// multiplicity 1 at the end and the proximity equality everywhere else.
std::vector<Int> curvette_multiplicities(const std::vector<Int>& chain,
                                         const std::vector<std::vector<Int>>& prox) {
  size_t len = chain.size();
  std::map<Int, size_t> pos;
  for (size_t i = 0; i < len; ++i) pos[chain[i]] = i;
  std::vector<Int> mu(len, 0);
  mu[len - 1] = 1;
  for (size_t i = len - 1; i-- > 0;) {
    Int total = 0;
    for (size_t j = i + 1; j < len; ++j)
      for (Int q : prox[static_cast<size_t>(chain[j])])
        if (pos.count(q) && pos[q] == i) total = checked_add(total, mu[j]);
    mu[i] = total;
    require_internal(mu[i] >= 1, "curvette multiplicity dropped to zero");
  }
  return mu;
}

// Reconstructs the (extended) characteristic exponents of the valuation from
// the curvette multiplicities along its chain. Stage boundaries are the free
// points following a satellite point; each completed stage is one
// characteristic exponent; trailing free points extend the sequence by one
// non-characteristic exponent.
CharSequence curvette_char_data(const std::vector<Int>& chain,
                                const std::vector<std::vector<Int>>& prox,
                                const std::vector<Int>& mu) {
  size_t len = chain.size();
  std::map<Int, size_t> pos;
  for (size_t i = 0; i < len; ++i) pos[chain[i]] = i;
  auto in_chain_prox = [&](size_t j) {
    Int cnt = 0;
    for (Int q : prox[static_cast<size_t>(chain[j])])
      if (pos.count(q)) ++cnt;
    return cnt;
  };

  Int n = mu[0];
  std::vector<Int> betas;
  Int beta_prev = 0;
  Int e = n;
  size_t i = 0;
  while (i < len && e > 1) {
    size_t j = i + 1;
    while (j < len && !(in_chain_prox(j) == 1 && in_chain_prox(j - 1) == 2)) ++j;
    // Stage emits mu[i..j); a = sum + gcd - b recovers the stage numerator.
    Int sum = 0;
    for (size_t l = i; l < j; ++l) sum = checked_add(sum, mu[l]);
    Int last = mu[j - 1];
    Int a = checked_sub(checked_add(sum, last), e);
    require_internal(a >= 1, "degenerate Euclid stage in curvette reconstruction");
    Int g = gcd_int(a, e);
    require_internal(g == last, "Euclid stage gcd mismatch in curvette reconstruction");
    betas.push_back(checked_add(beta_prev, a));
    beta_prev = betas.back();
    e = g;
    i = j;
  }
  bool extended = false;
  if (i < len) {
    require_internal(e == 1, "trailing free points with grid > 1");
    for (size_t l = i; l < len; ++l)
      require_internal(mu[l] == 1 && in_chain_prox(l) <= 1,
                       "trailing segment of a curvette chain must be free of multiplicity 1");
    betas.push_back(checked_add(beta_prev, static_cast<Int>(len - i)));
    extended = true;
  }
  return make_char_sequence(n, std::move(betas), extended);
}

// ---------------------------------------------------------------------------
// Finalization shared by all construction paths
// ---------------------------------------------------------------------------

void compute_decorations(DualGraph& g) {
  for (Int v = 0; v < g.n_vertices(); ++v) {
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs) {
      auto comp = g.component_without(v, w);
      std::set<Int> allowed(comp.begin(), comp.end());
      Int d = subtree_determinant(g.verts, allowed, w);
      require_internal(d >= 1, "decoration must be positive");
      g.verts[static_cast<size_t>(v)].dec[w] = d;
    }
  }
}

void compute_slots(DualGraph& g) {
  // E_{i_2}: neighbor toward the root. E_{i_1}: the unique other neighbor
  // whose component contains a vertex born earlier (nonzero exactly for
  // satellite vertices). Remaining neighbors and arrowheads fill slots >= 3.
  std::vector<Int> parent(static_cast<size_t>(g.n_vertices()), -1);
  {
    std::vector<Int> stack{g.root};
    std::vector<char> seen(static_cast<size_t>(g.n_vertices()), 0);
    seen[static_cast<size_t>(g.root)] = 1;
    while (!stack.empty()) {
      Int v = stack.back();
      stack.pop_back();
      for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          parent[static_cast<size_t>(w)] = v;
          stack.push_back(w);
        }
    }
  }
  for (Int v = 0; v < g.n_vertices(); ++v) {
    auto& vd = g.verts[static_cast<size_t>(v)];
    vd.slots.clear();
    SlotRef s1{SlotRef::Zero, -1}, s2{SlotRef::Zero, -1};
    if (v != g.root) s2 = SlotRef{SlotRef::Vertex, parent[static_cast<size_t>(v)]};
    Int birth_v = vd.birth;
    Int found = 0;
    for (Int w : vd.nbrs) {
      if (v != g.root && w == parent[static_cast<size_t>(v)]) continue;
      Int oldest = birth_v;
      for (Int u : g.component_without(v, w))
        oldest = std::min(oldest, g.verts[static_cast<size_t>(u)].birth);
      if (oldest < birth_v) {
        s1 = SlotRef{SlotRef::Vertex, w};
        ++found;
      }
    }
    require_internal(found <= 1, "ambiguous E_{i_1} designation at " + fmt_vertex(v));
    require_internal((found == 1) == vd.satellite,
                     "E_{i_1} designation disagrees with the satellite flag at " + fmt_vertex(v));
    vd.slots.push_back(s1);
    vd.slots.push_back(s2);
    for (Int w : vd.nbrs) {
      if (s1.kind == SlotRef::Vertex && s1.id == w) continue;
      if (s2.kind == SlotRef::Vertex && s2.id == w) continue;
      vd.slots.push_back(SlotRef{SlotRef::Vertex, w});
    }
    for (Int a : vd.arrows) vd.slots.push_back(SlotRef{SlotRef::Arrow, a});
  }
}

void compute_profiles(DualGraph& g, const std::vector<std::vector<Int>>& chains) {
  g.profile.assign(static_cast<size_t>(g.n_vertices()), VertexProfile{});
  for (Int v = 0; v < g.n_vertices(); ++v) {
    auto& pr = g.profile[static_cast<size_t>(v)];
    pr.chain = chains[static_cast<size_t>(v)];
    pr.curvette_mult = curvette_multiplicities(pr.chain, g.prox);
    pr.curvette = curvette_char_data(pr.chain, g.prox, pr.curvette_mult);
    pr.sg = pairs_to_semigroup(chars_to_pairs(pr.curvette));
    Int gg = pr.curvette.g();
    pr.mu0 = pr.curvette_mult[0];
    if (gg == 0) {
      pr.n_g = 1;
      pr.m_bar_g = 1;
      pr.m_g = 1;
    } else {
      pr.n_g = pr.curvette.nn[static_cast<size_t>(gg)];
      pr.m_g = pr.curvette.mm[static_cast<size_t>(gg)];
      pr.m_bar_g = pr.sg.reduced[static_cast<size_t>(gg)];
    }
  }
}

void compute_sites(DualGraph& g) {
  g.sites.clear();
  for (Int v = 0; v < g.n_vertices(); ++v)
    if (g.r_of(v) != 2) g.sites.push_back(Site{false, v});
  for (Int a = 0; a < g.n_arrows(); ++a) g.sites.push_back(Site{true, a});

  // Valuation vectors by the proximity recursion:
  // v_q(f_s) = sum over prox(q) of v + (multiplicity of f_s at q).
  g.site_val.assign(g.sites.size(), std::vector<Int>(static_cast<size_t>(g.n_vertices()), 0));
  for (size_t si = 0; si < g.sites.size(); ++si) {
    const Site& s = g.sites[si];
    std::vector<Int> chain;
    std::vector<Int> mu;
    if (!s.is_arrow) {
      chain = g.profile[static_cast<size_t>(s.id)].chain;
      mu = g.profile[static_cast<size_t>(s.id)].curvette_mult;
    } else {
      // The reduced branch through the arrowhead: its chain is the host's
      // birth chain, and its multiplicities are the curvette multiplicities
      // of the valuation it defines -- identical recursion.
      chain = g.profile[static_cast<size_t>(g.arrows[static_cast<size_t>(s.id)].host)].chain;
      mu = g.profile[static_cast<size_t>(g.arrows[static_cast<size_t>(s.id)].host)].curvette_mult;
    }
    std::map<Int, Int> mult_at;
    for (size_t i = 0; i < chain.size(); ++i) mult_at[chain[i]] = mu[i];
    auto& val = g.site_val[si];
    for (Int q = 0; q < g.n_vertices(); ++q) {  // vertices are in birth order
      Int total = 0;
      for (Int p : g.prox[static_cast<size_t>(q)]) total = checked_add(total, val[static_cast<size_t>(p)]);
      auto it = mult_at.find(q);
      if (it != mult_at.end()) total = checked_add(total, it->second);
      val[static_cast<size_t>(q)] = total;
    }
  }
}

void hard_checks(const DualGraph& g) {
  auto rep = validate_graph(g);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "constructed graph violates invariants:";
    for (auto& s : rep.violations) os << "\n  - " << s;
    throw internal_error(os.str());
  }
  // Numerical data must agree with the diagram calculus exactly.
  auto N = diagram_calculus_N(g);
  auto K = diagram_calculus_k(g);
  for (Int v = 0; v < g.n_vertices(); ++v) {
    require_internal(N[static_cast<size_t>(v)] == g.verts[static_cast<size_t>(v)].N,
                     "diagram calculus disagrees with N at " + fmt_vertex(v));
    require_internal(K[static_cast<size_t>(v)] == g.verts[static_cast<size_t>(v)].k,
                     "diagram calculus disagrees with k at " + fmt_vertex(v));
  }
  // Profile identities (curvette identities): decorations toward E_{i_1} and
  // E_{i_2} are n_g and m-bar_g, k_i = n_1...n_g + m_g, N_i(C_i) = n_g m-bar_g.
  for (Int v = 0; v < g.n_vertices(); ++v) {
    const auto& vd = g.verts[static_cast<size_t>(v)];
    const auto& pr = g.profile[static_cast<size_t>(v)];
    const SlotRef& s1 = vd.slots[0];
    const SlotRef& s2 = vd.slots[1];
    Int dec1 = s1.is_zero() ? 1 : vd.dec.at(s1.id);
    Int dec2 = s2.is_zero() ? 1 : vd.dec.at(s2.id);
    require_internal(dec1 == pr.n_g, "decoration toward E_{i_1} is not n_g at " + fmt_vertex(v));
    require_internal(dec2 == pr.m_bar_g,
                     "decoration toward E_{i_2} is not m-bar_g at " + fmt_vertex(v));
    require_internal(vd.k == checked_add(pr.mu0, pr.m_g),
                     "k_i != n_1...n_g + m_g at " + fmt_vertex(v));
  }
  for (Int v = 0; v < g.n_vertices(); ++v) {
    if (g.r_of(v) == 2) continue;
    Int s = g.site_of_vertex(v);
    const auto& pr = g.profile[static_cast<size_t>(v)];
    require_internal(g.site_val[static_cast<size_t>(s)][static_cast<size_t>(v)] ==
                         checked_mul(pr.n_g, pr.m_bar_g),
                     "N_i(C_i) != n_g m-bar_g at " + fmt_vertex(v));
  }
}

void finalize(DualGraph& g, const std::vector<std::vector<Int>>& chains) {
  for (auto& vd : g.verts) std::sort(vd.nbrs.begin(), vd.nbrs.end());
  compute_decorations(g);
  compute_slots(g);
  compute_profiles(g, chains);
  compute_sites(g);
  hard_checks(g);
}

}  // namespace

// Defined out of line so hard_checks can use it before the class body ends.
Int DualGraph::site_index(bool is_arrow, Int id) const {
  for (size_t i = 0; i < sites.size(); ++i)
    if (sites[i].is_arrow == is_arrow && sites[i].id == id) return static_cast<Int>(i);
  return -1;
}

std::pair<Int, Int> DualGraph::slot_Nk(const SlotRef& s) const {
  switch (s.kind) {
    case SlotRef::Zero:
      return {0, 1};
    case SlotRef::Vertex:
      return {verts[static_cast<size_t>(s.id)].N, verts[static_cast<size_t>(s.id)].k};
    case SlotRef::Arrow:
      return {arrows[static_cast<size_t>(s.id)].N, 1};
  }
  return {0, 1};
}

Int DualGraph::slot_site_val(const SlotRef& s, Int site) const {
  switch (s.kind) {
    case SlotRef::Zero:
      return 0;
    case SlotRef::Vertex:
      return site_val[static_cast<size_t>(site)][static_cast<size_t>(s.id)];
    case SlotRef::Arrow:
      // Multiplicity of the site element along the strict transform: one for
      // the branch itself, zero for every other site.
      return (sites[static_cast<size_t>(site)].is_arrow && sites[static_cast<size_t>(site)].id == s.id)
                 ? 1
                 : 0;
  }
  return 0;
}

std::vector<Int> DualGraph::component_without(Int v, Int nbr) const {
  std::vector<Int> out;
  std::vector<Int> stack{nbr};
  std::set<Int> seen{v, nbr};
  while (!stack.empty()) {
    Int u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (Int w : verts[static_cast<size_t>(u)].nbrs)
      if (!seen.count(w)) {
        seen.insert(w);
        stack.push_back(w);
      }
  }
  return out;
}

Int DualGraph::far_decoration_product(Int v, Int nbr) const {
  Int prod = 1;
  for (auto& [w, d] : verts[static_cast<size_t>(v)].dec)
    if (w != nbr) prod = checked_mul(prod, d);
  return prod;  // arrow edges carry decoration 1
}

// ---------------------------------------------------------------------------

DualGraph build_from_curve(const CurveSpec& spec) {
  Cluster cl = build_cluster(spec);
  Int n = static_cast<Int>(cl.mult.size());

  DualGraph g;
  g.verts.assign(static_cast<size_t>(n), VertexData{});
  g.prox = cl.prox;
  g.root = 0;

  for (Int p = 0; p < n; ++p) {
    auto& vd = g.verts[static_cast<size_t>(p)];
    vd.birth = p;
    vd.satellite = cl.prox[static_cast<size_t>(p)].size() == 2;
    Int N = cl.mult[static_cast<size_t>(p)];
    Int k = 2;
    for (Int q : cl.prox[static_cast<size_t>(p)]) {
      N = checked_add(N, g.verts[static_cast<size_t>(q)].N);
      k = checked_add(k, g.verts[static_cast<size_t>(q)].k - 1);
    }
    vd.N = N;
    vd.k = k;
  }
  // Self-intersections: one unit per later centre on the divisor.
  for (Int p = 0; p < n; ++p) g.verts[static_cast<size_t>(p)].self_int = -1;
  for (Int p = 0; p < n; ++p)
    for (Int q : cl.prox[static_cast<size_t>(p)]) g.verts[static_cast<size_t>(q)].self_int -= 1;

  // Edges: p proximate to q survives unless some later point is proximate to
  // both (that point is the blown-up intersection E_p cap E_q).
  std::set<std::pair<Int, Int>> destroyed;
  for (Int r = 0; r < n; ++r)
    if (cl.prox[static_cast<size_t>(r)].size() == 2) {
      Int a = cl.prox[static_cast<size_t>(r)][0];
      Int b = cl.prox[static_cast<size_t>(r)][1];
      destroyed.insert({std::min(a, b), std::max(a, b)});
    }
  for (Int p = 0; p < n; ++p)
    for (Int q : cl.prox[static_cast<size_t>(p)]) {
      auto key = std::make_pair(std::min(p, q), std::max(p, q));
      if (destroyed.count(key)) continue;
      g.verts[static_cast<size_t>(p)].nbrs.push_back(q);
      g.verts[static_cast<size_t>(q)].nbrs.push_back(p);
    }

  for (Int b = 0; b < spec.size(); ++b) {
    ArrowData a;
    a.host = cl.chain[static_cast<size_t>(b)].back();
    a.N = spec.branches[static_cast<size_t>(b)].power;
    a.branch = b;
    g.verts[static_cast<size_t>(a.host)].arrows.push_back(static_cast<Int>(g.arrows.size()));
    g.arrows.push_back(a);
  }

  // Birth chains: walk the proximity predecessors.
  std::vector<std::vector<Int>> chains(static_cast<size_t>(n));
  for (Int p = 0; p < n; ++p) {
    std::vector<Int> chain;
    Int cur = p;
    while (true) {
      chain.push_back(cur);
      if (g.prox[static_cast<size_t>(cur)].empty()) break;
      cur = *std::max_element(g.prox[static_cast<size_t>(cur)].begin(),
                              g.prox[static_cast<size_t>(cur)].end());
    }
    std::reverse(chain.begin(), chain.end());
    chains[static_cast<size_t>(p)] = chain;
  }

  finalize(g, chains);
  return g;
}

DualGraph build_from_branch(const BranchSpec& b) { return build_from_curve(single_branch_curve(b)); }

// ---------------------------------------------------------------------------
// Hand-entered graphs
// ---------------------------------------------------------------------------

namespace {

// Reverses the blow-up sequence by contracting (-1)-vertices of exceptional
// valency <= 2; recovers proximity, birth order and satellite flags.
void reconstruct_cluster(DualGraph& g) {
  Int n = g.n_vertices();
  std::vector<Int> self(static_cast<size_t>(n));
  std::vector<std::set<Int>> nbrs(static_cast<size_t>(n));
  for (Int v = 0; v < n; ++v) {
    self[static_cast<size_t>(v)] = g.verts[static_cast<size_t>(v)].self_int;
    nbrs[static_cast<size_t>(v)] =
        std::set<Int>(g.verts[static_cast<size_t>(v)].nbrs.begin(),
                      g.verts[static_cast<size_t>(v)].nbrs.end());
  }
  std::vector<char> alive(static_cast<size_t>(n), 1);
  std::vector<Int> order;  // contraction order, last blow-up first
  g.prox.assign(static_cast<size_t>(n), {});
  Int remaining = n;
  while (remaining > 1) {
    Int pick = -1;
    for (Int v = 0; v < n; ++v) {
      if (!alive[static_cast<size_t>(v)] || self[static_cast<size_t>(v)] != -1) continue;
      if (nbrs[static_cast<size_t>(v)].size() > 2) continue;
      pick = v;
      break;
    }
    require_input(pick >= 0, "graph does not contract to a point (not a blow-up graph)");
    std::vector<Int> touching(nbrs[static_cast<size_t>(pick)].begin(),
                              nbrs[static_cast<size_t>(pick)].end());
    g.prox[static_cast<size_t>(pick)] = touching;
    for (Int w : touching) {
      self[static_cast<size_t>(w)] += 1;
      nbrs[static_cast<size_t>(w)].erase(pick);
    }
    if (touching.size() == 2) {
      nbrs[static_cast<size_t>(touching[0])].insert(touching[1]);
      nbrs[static_cast<size_t>(touching[1])].insert(touching[0]);
    }
    alive[static_cast<size_t>(pick)] = 0;
    order.push_back(pick);
    --remaining;
  }
  Int root = -1;
  for (Int v = 0; v < n; ++v)
    if (alive[static_cast<size_t>(v)]) root = v;
  require_input(self[static_cast<size_t>(root)] == -1,
                "root vertex does not contract to a (-1)-curve");
  order.push_back(root);
  std::reverse(order.begin(), order.end());
  g.root = root;
  for (Int i = 0; i < n; ++i) g.verts[static_cast<size_t>(order[static_cast<size_t>(i)])].birth = i;
  for (Int v = 0; v < n; ++v) {
    g.verts[static_cast<size_t>(v)].satellite = g.prox[static_cast<size_t>(v)].size() == 2;
    // Proximity relations point to earlier blow-ups.
    for (Int q : g.prox[static_cast<size_t>(v)])
      require_input(g.verts[static_cast<size_t>(q)].birth < g.verts[static_cast<size_t>(v)].birth,
                    "contraction produced an acausal proximity");
  }
}

std::vector<std::vector<Int>> chains_from_prox(const DualGraph& g) {
  Int n = g.n_vertices();
  // Sort points by birth and take predecessor walks.
  std::vector<std::vector<Int>> chains(static_cast<size_t>(n));
  for (Int p = 0; p < n; ++p) {
    std::vector<Int> chain;
    Int cur = p;
    while (true) {
      chain.push_back(cur);
      const auto& pr = g.prox[static_cast<size_t>(cur)];
      if (pr.empty()) break;
      Int next = pr[0];
      for (Int q : pr)
        if (g.verts[static_cast<size_t>(q)].birth > g.verts[static_cast<size_t>(next)].birth) next = q;
      cur = next;
    }
    std::reverse(chain.begin(), chain.end());
    chains[static_cast<size_t>(p)] = chain;
  }
  return chains;
}

}  // namespace

DualGraph assemble_graph(const RawGraph& raw, bool allow_non_minimal) {
  require_input(raw.n_vertices >= 1, "graph needs at least one vertex");
  DualGraph g;
  g.verts.assign(static_cast<size_t>(raw.n_vertices), VertexData{});
  for (auto& [a, b] : raw.edges) {
    require_input(a >= 0 && a < raw.n_vertices && b >= 0 && b < raw.n_vertices && a != b,
                  "edge endpoint out of range");
    g.verts[static_cast<size_t>(a)].nbrs.push_back(b);
    g.verts[static_cast<size_t>(b)].nbrs.push_back(a);
  }
  for (auto& [host, N] : raw.arrowheads) {
    require_input(host >= 0 && host < raw.n_vertices, "arrowhead host out of range");
    require_input(N >= 1, "arrowhead multiplicity must be positive");
    ArrowData a;
    a.host = host;
    a.N = N;
    g.verts[static_cast<size_t>(host)].arrows.push_back(static_cast<Int>(g.arrows.size()));
    g.arrows.push_back(a);
  }
  require_input(!g.arrows.empty(), "graph needs at least one arrowhead (a curve)");

  // Tree check up front.
  {
    Int edge_count = static_cast<Int>(raw.edges.size());
    require_input(edge_count == raw.n_vertices - 1, "exceptional graph must be a tree");
    std::vector<char> seen(static_cast<size_t>(raw.n_vertices), 0);
    std::vector<Int> stack{0};
    seen[0] = 1;
    Int visited = 0;
    while (!stack.empty()) {
      Int v = stack.back();
      stack.pop_back();
      ++visited;
      for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          stack.push_back(w);
        }
    }
    require_input(visited == raw.n_vertices, "exceptional graph must be connected");
  }

  bool have_self = !raw.self_intersections.empty();
  bool have_dec = !raw.decorations.empty();
  require_input(have_self || have_dec || raw.n_vertices == 1,
                "give self-intersections or decorations");
  if (!have_self && raw.n_vertices == 1) {
    // Single blow-up: the antinef balance forces a (-1)-curve.
    g.verts[0].self_int = -1;
    have_self = true;
  }
  if (have_self) {
    require_input(static_cast<Int>(raw.self_intersections.size()) == raw.n_vertices,
                  "one self-intersection per vertex required");
    for (Int v = 0; v < raw.n_vertices; ++v) {
      require_input(raw.self_intersections[static_cast<size_t>(v)] <= -1,
                    "self-intersections of exceptional curves are negative");
      g.verts[static_cast<size_t>(v)].self_int = raw.self_intersections[static_cast<size_t>(v)];
    }
    compute_decorations(g);
    if (!raw.decorations.empty()) {
      for (auto& [key, val] : raw.decorations) {
        auto& vd = g.verts[static_cast<size_t>(key.first)];
        require_input(vd.dec.count(key.second) && vd.dec.at(key.second) == val,
                      "supplied decoration disagrees with the graph");
      }
    }
  } else {
    // Decorations given: recover N and k from the calculus, then derive the
    // self-intersections from the antinef balance; finally verify that the
    // derived self-intersections reproduce the supplied decorations.
    for (auto& [key, val] : raw.decorations) {
      require_input(val >= 1, "decorations are positive integers");
      g.verts[static_cast<size_t>(key.first)].dec[key.second] = val;
    }
    for (Int v = 0; v < raw.n_vertices; ++v)
      for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
        require_input(g.verts[static_cast<size_t>(v)].dec.count(w),
                      "missing decoration at " + fmt_vertex(v));
    // Edge determinant rule first: it names the offending edge.
    for (Int v = 0; v < raw.n_vertices; ++v)
      for (Int w : g.verts[static_cast<size_t>(v)].nbrs) {
        if (w < v) continue;
        Int alpha = g.verts[static_cast<size_t>(v)].dec.at(w);
        Int beta = g.verts[static_cast<size_t>(w)].dec.at(v);
        Int rest = checked_mul(g.far_decoration_product(v, w), g.far_decoration_product(w, v));
        require_input(checked_sub(checked_mul(alpha, beta), rest) == 1,
                      "edge determinant rule fails on edge (" + fmt_vertex(v) + ", " +
                          fmt_vertex(w) + ")");
      }
    auto N = diagram_calculus_N(g);
    for (Int v = 0; v < raw.n_vertices; ++v) {
      Int load = 0;
      for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
        load = checked_add(load, N[static_cast<size_t>(w)]);
      for (Int a : g.verts[static_cast<size_t>(v)].arrows)
        load = checked_add(load, g.arrows[static_cast<size_t>(a)].N);
      require_input(N[static_cast<size_t>(v)] > 0 && load % N[static_cast<size_t>(v)] == 0,
                    "antinef balance cannot assign a self-intersection at " + fmt_vertex(v));
      g.verts[static_cast<size_t>(v)].self_int = -(load / N[static_cast<size_t>(v)]);
    }
    auto saved = raw.decorations;
    for (auto& vd : g.verts) vd.dec.clear();
    compute_decorations(g);
    for (auto& [key, val] : saved)
      require_input(g.verts[static_cast<size_t>(key.first)].dec.at(key.second) == val,
                    "supplied decorations are not realizable by a blow-up graph");
  }

  // N and k from the calculus (needs decorations only).
  auto N = diagram_calculus_N(g);
  auto K = diagram_calculus_k(g);
  for (Int v = 0; v < raw.n_vertices; ++v) {
    g.verts[static_cast<size_t>(v)].N = N[static_cast<size_t>(v)];
    g.verts[static_cast<size_t>(v)].k = K[static_cast<size_t>(v)];
  }

  reconstruct_cluster(g);
  if (!raw.birth_order.empty()) {
    require_input(static_cast<Int>(raw.birth_order.size()) == raw.n_vertices,
                  "birth order must list every vertex");
    for (Int v = 0; v < raw.n_vertices; ++v)
      require_input(raw.birth_order[static_cast<size_t>(v)] ==
                        g.verts[static_cast<size_t>(v)].birth,
                    "supplied birth order disagrees with the contraction order");
  }

  if (!allow_non_minimal) {
    for (Int v = 0; v < g.n_vertices(); ++v) {
      if (g.n_vertices() == 1) break;
      Int total_valency = g.r_of(v);
      require_input(!(g.verts[static_cast<size_t>(v)].self_int == -1 && total_valency < 3),
                    "graph is not a minimal log resolution (contractible " + fmt_vertex(v) + ")");
    }
  } else {
    g.minimal = false;
    for (Int v = 0; v < g.n_vertices(); ++v)
      if (g.n_vertices() > 1 && g.verts[static_cast<size_t>(v)].self_int == -1 && g.r_of(v) < 3)
        g.minimal = false;
  }

  finalize(g, chains_from_prox(g));
  return g;
}

// ---------------------------------------------------------------------------
// Validation and calculus
// ---------------------------------------------------------------------------

ValidationReport validate_graph(const DualGraph& g) {
  ValidationReport rep;
  auto complain = [&](const std::string& s) { rep.violations.push_back(s); };

  Int n = g.n_vertices();
  Int edge_count = 0;
  for (Int v = 0; v < n; ++v) edge_count += static_cast<Int>(g.verts[static_cast<size_t>(v)].nbrs.size());
  if (edge_count != 2 * (n - 1)) complain("exceptional graph is not a tree");

  // Edge determinant rule on every exceptional edge.
  for (Int v = 0; v < n; ++v)
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs) {
      if (w < v) continue;
      Int alpha = g.verts[static_cast<size_t>(v)].dec.at(w);
      Int beta = g.verts[static_cast<size_t>(w)].dec.at(v);
      Int rest = checked_mul(g.far_decoration_product(v, w), g.far_decoration_product(w, v));
      if (checked_sub(checked_mul(alpha, beta), rest) != 1)
        complain("edge determinant rule fails on edge (" + fmt_vertex(v) + ", " + fmt_vertex(w) + ")");
    }

  // Decorations around a vertex: pairwise coprime, at most two exceed one.
  for (Int v = 0; v < n; ++v) {
    std::vector<Int> decs;
    for (auto& [w, d] : g.verts[static_cast<size_t>(v)].dec) decs.push_back(d);
    Int big = 0;
    for (Int d : decs)
      if (d > 1) ++big;
    if (big > 2) complain("more than two decorations exceed 1 at " + fmt_vertex(v));
    for (size_t i = 0; i < decs.size(); ++i)
      for (size_t j = i + 1; j < decs.size(); ++j)
        if (gcd_int(decs[i], decs[j]) != 1)
          complain("decorations at " + fmt_vertex(v) + " are not pairwise coprime");
  }

  // Antinef balance: F_pi . E_i = 0 for every exceptional component.
  for (Int v = 0; v < n; ++v) {
    Int total = checked_mul(g.verts[static_cast<size_t>(v)].N, g.verts[static_cast<size_t>(v)].self_int);
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
      total = checked_add(total, g.verts[static_cast<size_t>(w)].N);
    for (Int a : g.verts[static_cast<size_t>(v)].arrows)
      total = checked_add(total, g.arrows[static_cast<size_t>(a)].N);
    if (total != 0) complain("antinef balance fails at " + fmt_vertex(v));
  }

  // Adjunction: K_pi . E_i = -E_i^2 - 2.
  for (Int v = 0; v < n; ++v) {
    Int total = checked_mul(g.verts[static_cast<size_t>(v)].k - 1,
                            g.verts[static_cast<size_t>(v)].self_int);
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
      total = checked_add(total, g.verts[static_cast<size_t>(w)].k - 1);
    if (total != -g.verts[static_cast<size_t>(v)].self_int - 2)
      complain("adjunction fails for k at " + fmt_vertex(v));
  }

  // k_0 = 2 at the root; k >= 2 everywhere.
  if (g.verts[static_cast<size_t>(g.root)].k != 2) complain("root vertex must have k = 2");
  for (Int v = 0; v < n; ++v)
    if (g.verts[static_cast<size_t>(v)].k < 2) complain("k < 2 at " + fmt_vertex(v));

  return rep;
}

namespace {

// Product of decorations adjacent to, but not on, the path v_0 .. v_r
// (optionally extended by an arrow edge at the far end).
Int path_ell(const DualGraph& g, const std::vector<Int>& path, Int terminal_arrow) {
  Int prod = 1;
  for (size_t i = 0; i < path.size(); ++i) {
    Int v = path[i];
    for (auto& [w, d] : g.verts[static_cast<size_t>(v)].dec) {
      bool on_path = (i > 0 && path[i - 1] == w) || (i + 1 < path.size() && path[i + 1] == w);
      if (!on_path) prod = checked_mul(prod, d);
    }
    // Arrow edges carry decoration 1 at the host; nothing to multiply.
  }
  (void)terminal_arrow;
  return prod;
}

std::vector<Int> tree_path(const DualGraph& g, Int from, Int to) {
  std::vector<Int> parent(static_cast<size_t>(g.n_vertices()), -2);
  std::vector<Int> stack{from};
  parent[static_cast<size_t>(from)] = -1;
  while (!stack.empty()) {
    Int v = stack.back();
    stack.pop_back();
    if (v == to) break;
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
      if (parent[static_cast<size_t>(w)] == -2) {
        parent[static_cast<size_t>(w)] = v;
        stack.push_back(w);
      }
  }
  require_internal(parent[static_cast<size_t>(to)] != -2, "path endpoints not connected");
  std::vector<Int> path;
  for (Int v = to; v != -1; v = parent[static_cast<size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<Int> diagram_calculus_N(const DualGraph& g) {
  std::vector<Int> out(static_cast<size_t>(g.n_vertices()), 0);
  for (Int v = 0; v < g.n_vertices(); ++v) {
    Int total = 0;
    for (Int a = 0; a < g.n_arrows(); ++a) {
      auto path = tree_path(g, v, g.arrows[static_cast<size_t>(a)].host);
      total = checked_add(total, checked_mul(path_ell(g, path, a), g.arrows[static_cast<size_t>(a)].N));
    }
    out[static_cast<size_t>(v)] = total;
  }
  return out;
}

std::vector<Int> diagram_calculus_k(const DualGraph& g) {
  std::vector<Int> out(static_cast<size_t>(g.n_vertices()), 0);
  for (Int v = 0; v < g.n_vertices(); ++v) {
    Int total = 0;
    for (Int w = 0; w < g.n_vertices(); ++w) {
      Int delta = static_cast<Int>(g.verts[static_cast<size_t>(w)].nbrs.size());
      if (delta == 2) continue;
      auto path = tree_path(g, v, w);
      total = checked_add(total, checked_mul(path_ell(g, path, -1), 2 - delta));
    }
    out[static_cast<size_t>(v)] = total;
  }
  return out;
}

Int valuation_of_element(const DualGraph& g, const Site& elem, Int at) {
  require_input(at >= 0 && at < g.n_vertices(), "valuation point out of range");
  Int target = elem.is_arrow ? g.arrows[static_cast<size_t>(elem.id)].host : elem.id;
  auto path = tree_path(g, at, target);
  Int ell = path_ell(g, path, elem.is_arrow ? elem.id : -1);
  // Elements here are reduced (curvettes and reduced branches), so the
  // arrowhead valuation v_k is 1 and v_at = ell.
  Int si = g.site_index(elem.is_arrow, elem.id);
  if (si >= 0)
    require_internal(g.site_val[static_cast<size_t>(si)][static_cast<size_t>(at)] == ell,
                     "path product and cluster recursion disagree on a valuation");
  return ell;
}

const VertexProfile& neighbor_profile(const DualGraph& g, Int v) {
  require_input(v >= 0 && v < g.n_vertices(), "NotExceptional");
  return g.profile[static_cast<size_t>(v)];
}

std::vector<VertexClass> classify_vertices(const DualGraph& g) {
  std::vector<VertexClass> out(static_cast<size_t>(g.n_vertices()));
  for (Int v = 0; v < g.n_vertices(); ++v) {
    auto& c = out[static_cast<size_t>(v)];
    c.r = g.r_of(v);
    c.valency = c.r;
    c.m = static_cast<Int>(g.verts[static_cast<size_t>(v)].slots.size());
    c.rupture = c.r >= 3;
    c.satellite = g.verts[static_cast<size_t>(v)].satellite;
    c.dead_end = c.r == 1;
  }
  return out;
}

std::pair<Int, Int> adjacent_decomposition(const DualGraph& g, Int i, Int j) {
  require_input(i >= 0 && i < g.n_vertices() && j >= 0 && j < g.n_vertices(), "NotAdjacent");
  const auto& vi = g.verts[static_cast<size_t>(i)];
  require_input(std::find(vi.nbrs.begin(), vi.nbrs.end(), j) != vi.nbrs.end(), "NotAdjacent");
  Int alpha = vi.dec.at(j);
  Int alpha_rest = g.far_decoration_product(i, j);
  Int beta = g.verts[static_cast<size_t>(j)].dec.at(i);
  Int beta_rest = g.far_decoration_product(j, i);

  // Split arrows between the two sides of the edge.
  auto j_side = g.component_without(i, j);
  std::set<Int> j_side_set(j_side.begin(), j_side.end());
  Int sum_i_side = 0, sum_j_side = 0;
  for (Int a = 0; a < g.n_arrows(); ++a) {
    Int host = g.arrows[static_cast<size_t>(a)].host;
    auto path = tree_path(g, i, host);
    Int term = checked_mul(path_ell(g, path, a), g.arrows[static_cast<size_t>(a)].N);
    if (j_side_set.count(host))
      sum_j_side = checked_add(sum_j_side, term);
    else
      sum_i_side = checked_add(sum_i_side, term);
  }
  require_internal(sum_i_side % alpha == 0, "edge decomposition gamma_0 is not integral");
  require_internal(sum_j_side % alpha_rest == 0, "edge decomposition gamma_1 is not integral");
  Int gamma0 = sum_i_side / alpha;
  Int gamma1 = sum_j_side / alpha_rest;
  require_internal(g.verts[static_cast<size_t>(i)].N ==
                       checked_add(checked_mul(alpha, gamma0), checked_mul(alpha_rest, gamma1)),
                   "edge decomposition equation for N_i fails");
  require_internal(g.verts[static_cast<size_t>(j)].N ==
                       checked_add(checked_mul(beta_rest, gamma0), checked_mul(beta, gamma1)),
                   "edge decomposition equation for N_j fails");
  return {gamma0, gamma1};
}

// ---------------------------------------------------------------------------
// Test-only refinements
// ---------------------------------------------------------------------------

namespace {

RawGraph to_raw(const DualGraph& g) {
  RawGraph raw;
  raw.n_vertices = g.n_vertices();
  for (Int v = 0; v < g.n_vertices(); ++v) {
    raw.self_intersections.push_back(g.verts[static_cast<size_t>(v)].self_int);
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
      if (w > v) raw.edges.emplace_back(v, w);
  }
  for (auto& a : g.arrows) raw.arrowheads.emplace_back(a.host, a.N);
  return raw;
}

}  // namespace

DualGraph blow_up_edge(const DualGraph& g, Int a, Int b) {
  RawGraph raw = to_raw(g);
  Int fresh = raw.n_vertices++;
  raw.edges.erase(std::remove(raw.edges.begin(), raw.edges.end(),
                              std::make_pair(std::min(a, b), std::max(a, b))),
                  raw.edges.end());
  raw.edges.emplace_back(std::min(a, fresh), std::max(a, fresh));
  raw.edges.emplace_back(std::min(b, fresh), std::max(b, fresh));
  raw.self_intersections[static_cast<size_t>(a)] -= 1;
  raw.self_intersections[static_cast<size_t>(b)] -= 1;
  raw.self_intersections.push_back(-1);
  return assemble_graph(raw, /*allow_non_minimal=*/true);
}

DualGraph blow_up_free_point(const DualGraph& g, Int v) {
  RawGraph raw = to_raw(g);
  Int fresh = raw.n_vertices++;
  raw.edges.emplace_back(v, fresh);
  raw.self_intersections[static_cast<size_t>(v)] -= 1;
  raw.self_intersections.push_back(-1);
  return assemble_graph(raw, /*allow_non_minimal=*/true);
}

}  // namespace toproots
