#include "toproots/report.hpp"

#include <set>
#include <sstream>

#include "json.hpp"

namespace toproots {

using Json = nlohmann::ordered_json;

namespace {

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<Int>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw input_error("expected an integer or a \"p/q\" string at " + j.dump());
}

CurveSpec curve_from_json(const Json& doc) {
  require_input(doc.contains("branches") && doc["branches"].is_array(),
                "curve input needs a \"branches\" array");
  std::vector<BranchSpec> branches;
  for (const auto& b : doc["branches"]) {
    BranchSpec spec;
    spec.power = b.value("power", Int(1));
    bool have = false;
    if (b.contains("char_exponents")) {
      const auto& c = b["char_exponents"];
      require_input(c.contains("n"), "char_exponents needs \"n\"");
      std::vector<Int> betas;
      for (const auto& x : c.value("betas", Json::array())) betas.push_back(x.get<Int>());
      spec.invariants = make_char_sequence(c["n"].get<Int>(), betas, c.value("extended", false));
      have = true;
    }
    if (b.contains("puiseux_pairs")) {
      require_input(!have, "give char_exponents or puiseux_pairs, not both");
      const auto& p = b["puiseux_pairs"];
      PuiseuxPairs pp;
      pp.extended = p.value("extended", false);
      for (const auto& q : p["pairs"]) {
        require_input(q.is_array() && q.size() == 2, "each pair is [q_i, n_i]");
        pp.pairs.emplace_back(q[0].get<Int>(), q[1].get<Int>());
      }
      spec.invariants = pairs_to_chars(pp);
      have = true;
    }
    require_input(have, "branch needs char_exponents or puiseux_pairs");
    branches.push_back(std::move(spec));
  }
  std::vector<std::vector<std::optional<Rat>>> contacts;
  if (doc.contains("contacts")) {
    for (const auto& row : doc["contacts"]) {
      contacts.emplace_back();
      for (const auto& cell : row) {
        if (cell.is_null())
          contacts.back().push_back(std::nullopt);
        else
          contacts.back().push_back(rat_from_json(cell));
      }
    }
  }
  return make_curve_spec(std::move(branches), std::move(contacts));
}

RawGraph graph_from_json(const Json& doc) {
  RawGraph raw;
  require_input(doc.contains("vertices") && doc["vertices"].is_array(),
                "dual_graph needs a \"vertices\" array");
  raw.n_vertices = static_cast<Int>(doc["vertices"].size());
  std::vector<std::optional<Int>> selfs(static_cast<size_t>(raw.n_vertices));
  Int next_id = 0;
  for (const auto& v : doc["vertices"]) {
    Int id = v.value("id", next_id);
    require_input(id == next_id, "vertex ids must be 0..n-1 in order");
    ++next_id;
    if (v.contains("self_intersection"))
      selfs[static_cast<size_t>(id)] = v["self_intersection"].get<Int>();
  }
  Int have_self = 0;
  for (auto& s : selfs) have_self += s.has_value();
  require_input(have_self == 0 || have_self == raw.n_vertices,
                "give self-intersections for all vertices or none");
  if (have_self)
    for (auto& s : selfs) raw.self_intersections.push_back(*s);
  for (const auto& e : doc.value("edges", Json::array())) {
    require_input(e.is_array() && e.size() == 2, "each edge is [a, b]");
    raw.edges.emplace_back(e[0].get<Int>(), e[1].get<Int>());
  }
  for (const auto& a : doc.value("arrowheads", Json::array()))
    raw.arrowheads.emplace_back(a["host"].get<Int>(), a.value("N", Int(1)));
  for (const auto& d : doc.value("decorations", Json::array())) {
    require_input(d.contains("edge") && d.contains("at") && d.contains("value"),
                  "each decoration is {edge:[a,b], at:v, value:n}");
    Int a = d["edge"][0].get<Int>(), b = d["edge"][1].get<Int>();
    Int at = d["at"].get<Int>();
    require_input(at == a || at == b, "decoration \"at\" must be an edge endpoint");
    raw.decorations[{at, at == a ? b : a}] = d["value"].get<Int>();
  }
  for (const auto& b : doc.value("birth_order", Json::array()))
    raw.birth_order.push_back(b.get<Int>());
  return raw;
}

Json graph_section(const DualGraph& g) {
  Json out;
  Json verts = Json::array();
  auto cls = classify_vertices(g);
  for (Int v = 0; v < g.n_vertices(); ++v) {
    const auto& vd = g.verts[static_cast<size_t>(v)];
    Json jv;
    jv["id"] = v;
    jv["N"] = vd.N;
    jv["k"] = vd.k;
    jv["self_intersection"] = vd.self_int;
    jv["birth"] = vd.birth;
    jv["r"] = cls[static_cast<size_t>(v)].r;
    jv["rupture"] = cls[static_cast<size_t>(v)].rupture;
    jv["satellite"] = cls[static_cast<size_t>(v)].satellite;
    jv["dead_end"] = cls[static_cast<size_t>(v)].dead_end;
    verts.push_back(jv);
  }
  out["root"] = g.root;
  out["vertices"] = verts;
  Json edges = Json::array();
  for (Int v = 0; v < g.n_vertices(); ++v)
    for (Int w : g.verts[static_cast<size_t>(v)].nbrs)
      if (w > v) edges.push_back(Json::array({v, w}));
  out["edges"] = edges;
  Json arrows = Json::array();
  for (const auto& a : g.arrows) arrows.push_back(Json{{"host", a.host}, {"N", a.N}});
  out["arrowheads"] = arrows;
  Json decs = Json::array();
  for (Int v = 0; v < g.n_vertices(); ++v)
    for (const auto& [w, d] : g.verts[static_cast<size_t>(v)].dec)
      decs.push_back(Json{{"edge", Json::array({std::min(v, w), std::max(v, w)})},
                          {"at", v},
                          {"value", d}});
  out["decorations"] = decs;
  out["lct"] = log_canonical_threshold(g).str();
  return out;
}

Json roots_section(const RootsResult& rr, const DualGraph& g, bool diagnostics) {
  Json out;
  Json entries = Json::array();
  for (const auto& e : rr.roots.entries) {
    Json je;
    je["root"] = e.root.str();
    je["multiplicity"] = e.multiplicity;
    Json sources = Json::array();
    for (const auto& s : e.sources) {
      Json js;
      if (s.divisor >= 0) js["divisor"] = s.divisor;
      if (s.arrow >= 0) js["arrowhead"] = s.arrow;
      js["v"] = s.v;
      js["criterion"] = criterion_name(s.criterion);
      sources.push_back(js);
    }
    je["sources"] = sources;
    if (!e.eps_witness.empty()) {
      Json eps = Json::array();
      for (const auto& r : e.eps_witness) eps.push_back(r.str());
      je["eps_witness"] = eps;
    }
    if (e.chain.has_value()) {
      Json jc;
      jc["path"] = e.chain->path;
      jc["arrow_endpoints"] = e.chain->arrow_endpoints;
      jc["sigma"] = e.chain->sigma_value.str();
      Json wexp = Json::array();
      for (size_t s = 0; s < e.chain->witness.exponents.size(); ++s)
        if (e.chain->witness.exponents[s] != 0)
          wexp.push_back(Json{{"site", g.sites[s].is_arrow ? "arrow" : "vertex"},
                              {"id", g.sites[s].id},
                              {"exponent", e.chain->witness.exponents[s]}});
      jc["witness"] = wexp;
      je["chain"] = jc;
    }
    if (e.lct_double_note) je["lct_double_note"] = true;
    entries.push_back(je);
  }
  out["entries"] = entries;
  if (diagnostics) {
    Json diag = Json::array();
    for (const auto& s : rr.unclassified) {
      const auto& vd = g.verts[static_cast<size_t>(s.divisor)];
      diag.push_back(Json{{"divisor", s.divisor},
                          {"v", s.v},
                          {"sigma", Rat(-(vd.k + s.v), vd.N).str()}});
    }
    out["unclassified_candidates"] = diag;
  }
  return out;
}

Json jumping_section(const std::vector<JumpingNumber>& jn) {
  Json out;
  Json values = Json::array();
  for (const auto& j : jn)
    values.push_back(Json{{"value", j.value.str()}, {"contributing", j.contributing}});
  out["values"] = values;
  out["count"] = static_cast<Int>(jn.size());
  return out;
}

Json zeta_section(const DualGraph& g) {
  Json out;
  auto Z = topological_zeta(g);
  Json parts = Json::array();
  for (const auto& p : Z.parts)
    parts.push_back(Json{{"location", p.location.str()},
                         {"a1", p.a1},
                         {"a2", p.a2},
                         {"order", p.pole_order}});
  out["principal_parts"] = parts;
  Json poles = Json::array();
  for (const auto& p : pole_classification(g)) {
    Json jp;
    jp["location"] = p.location.str();
    jp["order"] = p.order;
    jp["rupture_witnesses"] = p.rupture_witnesses;
    Json pairs = Json::array();
    for (auto& [a, b] : p.equal_ratio_pairs) pairs.push_back(Json::array({a, b}));
    jp["equal_ratio_pairs"] = pairs;
    jp["arrow_witnesses"] = p.arrow_witnesses;
    poles.push_back(jp);
  }
  out["poles"] = poles;
  return out;
}

Json containment_section(const DualGraph& g, const RootMultiset& roots) {
  Json out;
  auto jrep = check_jumping_containment(g, roots);
  Json jm = Json::array();
  for (const auto& m : jrep.matches)
    jm.push_back(Json{{"value", m.value.str()},
                      {"matched", m.matched},
                      {"multiplicity", m.multiplicity},
                      {"case", m.kind}});
  out["jumping"] = Json{{"pass", jrep.pass}, {"matches", jm}};
  auto zrep = check_zeta_containment(g, roots);
  Json zm = Json::array();
  for (const auto& m : zrep.matches)
    zm.push_back(Json{{"location", m.location.str()},
                      {"order", m.order},
                      {"matched", m.matched},
                      {"multiplicity", m.multiplicity}});
  out["zeta"] = Json{{"pass", zrep.pass}, {"matches", zm}};
  out["pass"] = jrep.pass && zrep.pass;
  return out;
}

}  // namespace

InputDocument parse_input_document(const std::string& json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw input_error(std::string("JSON parse error: ") + e.what());
  }
  InputDocument out;
  bool have_curve = doc.contains("branches");
  bool have_graph = doc.contains("dual_graph");
  require_input(have_curve != have_graph,
                "give exactly one of \"branches\" (+\"contacts\") or \"dual_graph\"");
  try {
    if (have_curve)
      out.curve = curve_from_json(doc);
    else
      out.graph = graph_from_json(doc["dual_graph"]);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("input schema error: ") + e.what());
  }
  return out;
}

DualGraph build_input_graph(const InputDocument& doc) {
  if (doc.curve.has_value()) return build_from_curve(*doc.curve);
  return assemble_graph(*doc.graph);
}

std::string build_report_json(const DualGraph& g, const ReportOptions& opt) {
  Json out;
  if (opt.graph_section) out["graph"] = graph_section(g);
  std::optional<RootsResult> rr;
  if (opt.roots_section || opt.containment_section) rr = topological_roots_full(g);
  if (opt.roots_section) out["roots"] = roots_section(*rr, g, opt.diagnostics);
  if (opt.jumping_section) out["jumping"] = jumping_section(jumping_numbers(g));
  if (opt.zeta_section) out["zeta"] = zeta_section(g);
  if (opt.containment_section) out["containment"] = containment_section(g, rr->roots);
  return out.dump(2) + "\n";
}

namespace {

std::string render_tables(const Json& doc) {
  std::ostringstream os;
  if (doc.contains("graph")) {
    os << "vertex | N | k | E^2 | r | flags\n";
    os << "-------+---+---+-----+---+------\n";
    for (const auto& v : doc["graph"]["vertices"]) {
      os << "E_" << v["id"].get<Int>() << " | " << v["N"].get<Int>() << " | " << v["k"].get<Int>()
         << " | " << v["self_intersection"].get<Int>() << " | " << v["r"].get<Int>() << " |";
      if (v["rupture"].get<bool>()) os << " rupture";
      if (v["satellite"].get<bool>()) os << " satellite";
      if (v["dead_end"].get<bool>()) os << " dead-end";
      os << "\n";
    }
    os << "lct = " << doc["graph"]["lct"].get<std::string>() << "\n";
  }
  if (doc.contains("roots")) {
    os << "\nroot | multiplicity | criteria\n";
    os << "-----+--------------+---------\n";
    for (const auto& e : doc["roots"]["entries"]) {
      os << e["root"].get<std::string>() << " | " << e["multiplicity"].get<Int>() << " |";
      std::set<std::string> crits;
      for (const auto& s : e["sources"]) crits.insert(s["criterion"].get<std::string>());
      for (const auto& c : crits) os << " " << c;
      os << "\n";
    }
  }
  if (doc.contains("jumping")) {
    os << "\njumping numbers in (0,1):";
    for (const auto& j : doc["jumping"]["values"]) os << " " << j["value"].get<std::string>();
    os << "\n";
  }
  if (doc.contains("zeta")) {
    os << "\npole | order\n-----+------\n";
    for (const auto& p : doc["zeta"]["poles"])
      os << p["location"].get<std::string>() << " | " << p["order"].get<Int>() << "\n";
  }
  if (doc.contains("containment")) {
    const auto& c = doc["containment"];
    os << "\ncontainment: " << (c["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  }
  return os.str();
}

}  // namespace

std::string build_report_table(const DualGraph& g, const ReportOptions& opt) {
  return render_tables(Json::parse(build_report_json(g, opt)));
}

AuditOutcome run_audit(const DualGraph& g) {
  AuditOutcome out;
  auto roots = topological_roots(g);
  auto jrep = check_jumping_containment(g, roots);
  auto zrep = check_zeta_containment(g, roots);
  out.jumping_total = static_cast<Int>(jrep.matches.size());
  for (const auto& m : jrep.matches) out.jumping_matched += m.matched;
  out.zeta_total = static_cast<Int>(zrep.matches.size());
  for (const auto& m : zrep.matches) out.zeta_matched += m.matched;
  out.pass = jrep.pass && zrep.pass;
  std::ostringstream os;
  os << "containment: " << (out.pass ? "PASS" : "FAIL") << "; jumping " << out.jumping_matched
     << "/" << out.jumping_total << " matched; zeta poles " << out.zeta_matched << "/"
     << out.zeta_total << " matched";
  out.summary = os.str();
  return out;
}

RandomAuditOutcome run_random_audit(unsigned seed, Int count, const CorpusOptions& opt) {
  RandomAuditOutcome out;
  std::mt19937 rng(seed);
  for (Int i = 0; i < count; ++i) {
    CurveSpec spec = random_curve(rng, opt);
    ++out.curves;
    try {
      auto g = build_from_curve(spec);
      auto audit = run_audit(g);
      if (!audit.pass)
        out.failures.push_back("curve " + std::to_string(i) + ": " + audit.summary);
    } catch (const std::exception& e) {
      out.failures.push_back("curve " + std::to_string(i) + ": exception: " + e.what());
    }
  }
  out.pass = out.failures.empty();
  return out;
}

}  // namespace toproots
