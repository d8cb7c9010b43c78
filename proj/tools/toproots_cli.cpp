// Command-line front end: resolve curve descriptions, compute roots, jumping
// numbers and zeta poles, and run the containment audit.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "toproots/report.hpp"

using namespace toproots;

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw input_error("cannot read input file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw input_error("cannot write output file: " + out_path);
  out << text;
}

int run_sections(const std::string& input, const std::string& format, const std::string& out_path,
                 ReportOptions opt) {
  auto doc = parse_input_document(slurp(input));
  auto g = build_input_graph(doc);
  std::string text = format == "table" ? build_report_table(g, opt) : build_report_json(g, opt);
  emit(text, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological roots of Bernstein-Sato polynomials of plane curves"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string format = "json";
  std::string out_path;
  bool diagnostics = false;
  unsigned seed = 1;
  Int count = 100;
  bool random_corpus = false;

  auto add_common = [&](CLI::App* cmd, bool with_input = true) {
    if (with_input) cmd->add_option("input", input, "input JSON file (\"-\" for stdin)");
    cmd->add_option("--format", format, "json or table")
        ->check(CLI::IsMember({"json", "table"}));
    cmd->add_option("--out", out_path, "write the report to a file");
    cmd->add_flag("--diagnostics", diagnostics, "include unclassified candidate values");
  };

  auto* resolve = app.add_subcommand("resolve", "resolution graph only");
  add_common(resolve);
  auto* roots = app.add_subcommand("roots", "topological roots of geometric origin");
  add_common(roots);
  auto* jumping = app.add_subcommand("jumping", "jumping numbers in (0,1)");
  add_common(jumping);
  auto* zeta = app.add_subcommand("zeta", "topological zeta function and poles");
  add_common(zeta);
  auto* audit = app.add_subcommand("audit", "full containment audit");
  add_common(audit);
  audit->add_flag("--random", random_corpus, "audit a random curve corpus instead of an input");
  audit->add_option("--seed", seed, "corpus seed");
  audit->add_option("--count", count, "corpus size");
  auto* validate = app.add_subcommand("validate", "check the graph invariants only");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (resolve->parsed())
      return run_sections(input, format, out_path, ReportOptions{true, false, false, false, false, diagnostics});
    if (roots->parsed())
      return run_sections(input, format, out_path, ReportOptions{false, true, false, false, false, diagnostics});
    if (jumping->parsed())
      return run_sections(input, format, out_path, ReportOptions{false, false, true, false, false, diagnostics});
    if (zeta->parsed())
      return run_sections(input, format, out_path, ReportOptions{false, false, false, true, false, diagnostics});
    if (audit->parsed()) {
      if (random_corpus) {
        auto outcome = run_random_audit(seed, count);
        std::ostringstream os;
        os << "random audit: " << (outcome.pass ? "PASS" : "FAIL") << " over " << outcome.curves
           << " curves\n";
        for (const auto& f : outcome.failures) os << "  " << f << "\n";
        emit(os.str(), out_path);
        return outcome.pass ? 0 : 2;
      }
      auto doc = parse_input_document(slurp(input));
      auto g = build_input_graph(doc);
      auto outcome = run_audit(g);
      if (format == "json") {
        ReportOptions opt{false, true, true, true, true, diagnostics};
        emit(build_report_json(g, opt), out_path);
      } else {
        emit(outcome.summary + "\n", out_path);
      }
      return outcome.pass ? 0 : 2;
    }
    if (validate->parsed()) {
      auto doc = parse_input_document(slurp(input));
      auto g = build_input_graph(doc);
      auto rep = validate_graph(g);
      std::ostringstream os;
      if (rep.ok()) {
        os << "valid\n";
      } else {
        for (const auto& v : rep.violations) os << v << "\n";
      }
      emit(os.str(), out_path);
      return rep.ok() ? 0 : 1;
    }
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const internal_error& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
