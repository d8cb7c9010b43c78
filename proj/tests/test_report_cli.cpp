#include "doctest.h"
#include "toproots/report.hpp"

using namespace toproots;

namespace {

const char* kCuspJson = R"({"branches":[{"char_exponents":{"n":2,"betas":[3]},"power":1}]})";

const char* kTwoCuspsJson = R"({
  "branches":[{"char_exponents":{"n":2,"betas":[3]},"power":1},
              {"puiseux_pairs":{"pairs":[[3,2]]},"power":1}],
  "contacts":[[null,"3/2"],["3/2",null]]
})";

const char* kCuspGraphJson = R"({"dual_graph":{
  "vertices":[{"id":0,"self_intersection":-3},{"id":1,"self_intersection":-2},
              {"id":2,"self_intersection":-1}],
  "edges":[[0,2],[1,2]],
  "arrowheads":[{"host":2,"N":1}]}})";

}  // namespace

TEST_CASE("input parsing: curves and graphs") {
  auto doc = parse_input_document(kCuspJson);
  REQUIRE(doc.curve.has_value());
  auto g = build_input_graph(doc);
  CHECK(g.n_vertices() == 3);
  CHECK(g.verts[2].N == 6);

  auto doc2 = parse_input_document(kTwoCuspsJson);
  auto g2 = build_input_graph(doc2);
  CHECK(g2.verts[2].N == 12);
  CHECK(g2.arrows.size() == 2);

  auto doc3 = parse_input_document(kCuspGraphJson);
  REQUIRE(doc3.graph.has_value());
  auto g3 = build_input_graph(doc3);
  CHECK(g3.verts[2].N == 6);
  CHECK(g3.verts[2].k == 5);

  CHECK_THROWS_AS(parse_input_document("{"), input_error);
  CHECK_THROWS_AS(parse_input_document("{}"), input_error);
  CHECK_THROWS_AS(parse_input_document(R"({"branches":[],"dual_graph":{}})"), input_error);
}

TEST_CASE("reports are deterministic and carry exact rationals") {
  auto g = build_input_graph(parse_input_document(kCuspJson));
  ReportOptions all{true, true, true, true, true, true};
  auto t1 = build_report_json(g, all);
  auto t2 = build_report_json(g, all);
  CHECK(t1 == t2);
  CHECK(t1.find("\"-5/6\"") != std::string::npos);
  CHECK(t1.find("\"5/6\"") != std::string::npos);   // jumping number
  CHECK(t1.find("\"lct\": \"5/6\"") != std::string::npos);
  // Unclassified candidates surface under diagnostics.
  CHECK(t1.find("unclassified_candidates") != std::string::npos);

  auto table = build_report_table(g, all);
  CHECK(table.find("containment: PASS") != std::string::npos);
}

TEST_CASE("audit summaries") {
  auto g = build_input_graph(parse_input_document(kCuspJson));
  auto audit = run_audit(g);
  CHECK(audit.pass);
  CHECK(audit.summary == "containment: PASS; jumping 1/1 matched; zeta poles 2/2 matched");

  auto rnd = run_random_audit(7, 10);
  CHECK(rnd.pass);
  CHECK(rnd.curves == 10);
}

TEST_CASE("graph input with decorations and a perturbed decoration") {
  const char* with_dec = R"({"dual_graph":{
    "vertices":[{"id":0},{"id":1},{"id":2}],
    "edges":[[0,2],[1,2]],
    "arrowheads":[{"host":2,"N":1}],
    "decorations":[{"edge":[0,2],"at":0,"value":1},{"edge":[0,2],"at":2,"value":3},
                   {"edge":[1,2],"at":1,"value":2},{"edge":[1,2],"at":2,"value":2}]}})";
  auto g = build_input_graph(parse_input_document(with_dec));
  CHECK(g.verts[0].self_int == -3);
  CHECK(g.verts[2].N == 6);

  const char* bad_dec = R"({"dual_graph":{
    "vertices":[{"id":0},{"id":1},{"id":2}],
    "edges":[[0,2],[1,2]],
    "arrowheads":[{"host":2,"N":1}],
    "decorations":[{"edge":[0,2],"at":0,"value":1},{"edge":[0,2],"at":2,"value":4},
                   {"edge":[1,2],"at":1,"value":2},{"edge":[1,2],"at":2,"value":2}]}})";
  try {
    build_input_graph(parse_input_document(bad_dec));
    FAIL("expected an input error");
  } catch (const input_error& e) {
    CHECK(std::string(e.what()).find("edge (E_0, E_2)") != std::string::npos);
  }
}

TEST_CASE("graph section round-trips through the dual_graph input schema") {
  for (const char* input : {kCuspJson, kTwoCuspsJson}) {
    auto g = build_input_graph(parse_input_document(input));
    ReportOptions opt;
    opt.graph_section = true;
    auto text = build_report_json(g, opt);
    // Wrap the emitted graph section as an input document.
    auto pos = text.find("\"graph\": ");
    REQUIRE(pos != std::string::npos);
    std::string wrapped = "{\"dual_graph\": " + text.substr(pos + 9, text.rfind('}') - pos - 10) + "}";
    auto h = build_input_graph(parse_input_document(wrapped));
    REQUIRE(h.n_vertices() == g.n_vertices());
    for (Int v = 0; v < g.n_vertices(); ++v) {
      CHECK(h.verts[static_cast<size_t>(v)].N == g.verts[static_cast<size_t>(v)].N);
      CHECK(h.verts[static_cast<size_t>(v)].k == g.verts[static_cast<size_t>(v)].k);
      CHECK(h.verts[static_cast<size_t>(v)].self_int == g.verts[static_cast<size_t>(v)].self_int);
    }
  }
}
