#ifndef TOPROOTS_REPORT_HPP
#define TOPROOTS_REPORT_HPP

#include <iosfwd>
#include <string>

#include "toproots/corpus.hpp"
#include "toproots/multiplier_jumping.hpp"
#include "toproots/zeta_poles.hpp"

namespace toproots {

// Parsed input document: exactly one of the two forms.
struct InputDocument {
  std::optional<CurveSpec> curve;
  std::optional<RawGraph> graph;
};

InputDocument parse_input_document(const std::string& json_text);
DualGraph build_input_graph(const InputDocument& doc);

struct ReportOptions {
  bool graph_section = false;
  bool roots_section = false;
  bool jumping_section = false;
  bool zeta_section = false;
  bool containment_section = false;
  bool diagnostics = false;
};

// Assembles the requested sections as a deterministic JSON document (exact
// rationals as "p/q" strings, stable ordering).
std::string build_report_json(const DualGraph& g, const ReportOptions& opt);

// Human-readable tables derived from the same data.
std::string build_report_table(const DualGraph& g, const ReportOptions& opt);

struct AuditOutcome {
  bool pass = true;
  Int jumping_total = 0, jumping_matched = 0;
  Int zeta_total = 0, zeta_matched = 0;
  std::string summary;  // "containment: PASS; jumping 8/8 matched; ..."
};

AuditOutcome run_audit(const DualGraph& g);

struct RandomAuditOutcome {
  bool pass = true;
  Int curves = 0;
  std::vector<std::string> failures;
};

RandomAuditOutcome run_random_audit(unsigned seed, Int count, const CorpusOptions& opt = {});

}  // namespace toproots

#endif
