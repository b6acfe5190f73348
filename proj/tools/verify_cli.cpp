#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "finecalc/errors.hpp"
#include "finecalc/harness.hpp"

namespace {

constexpr int kExitConfig = 2;

bool write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out) {
    std::cerr << "verify-cli: cannot write " << path << '\n';
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks the harmonic and biharmonic S-spectrum calculi in R_5 and reports residuals."};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> rank;
  std::optional<int> nodes;
  std::optional<double> tol;
  std::string json_out;
  std::string csv_out;
  std::string curves_out;
  std::string dump_out;
  bool negative_controls = false;
  bool parallel = false;
  bool timings = false;
  bool quiet = false;

  app.add_option("--config", config_path, "JSON config mirroring HarnessConfig")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--d", rank, "module rank of T")->check(CLI::Range(1, 16));
  app.add_option("--nodes", nodes, "quadrature nodes per contour")->check(CLI::Range(8, 65536));
  app.add_option("--tol", tol, "override every residual tolerance (not orders, ratios or margins)")
      ->check(CLI::PositiveNumber);
  app.add_option("--json-out", json_out, "write the JSON report here");
  app.add_option("--csv-out", csv_out, "write the records as CSV here");
  app.add_option("--curves-out", curves_out, "write finite-difference residual curves as CSV here");
  app.add_option("--dump-out", dump_out, "write reproduced operator coefficients as JSON here");
  app.add_flag("--negative-controls", negative_controls, "add checks that must fail");
  app.add_flag("--parallel", parallel, "OpenMP inside checks; results agree only to tolerance");
  app.add_flag("--timings", timings, "record wall time per check (breaks byte-identical reports)");
  app.add_flag("-q,--quiet", quiet, "no text summary on stdout");

  std::string suite;
  for (const char* name : {"identities", "calculus", "kernels", "all"}) {
    app.add_subcommand(name, std::string(name) == "all" ? std::string("run every suite") : std::string("run the ") + name + " suite")
        ->fallthrough()
        ->callback([&suite, name] { suite = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  finecalc::HarnessConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream body;
      body << in.rdbuf();
      cfg = finecalc::HarnessConfig::from_json(body.str());
    }
    if (suite == "all") {
      cfg.suites = {"identities", "calculus", "kernels"};
    } else {
      cfg.suites = {suite};
    }
    if (seed) cfg.seed = *seed;
    if (rank) {
      cfg.d = *rank;
      if (!cfg.eigenvalues.empty() && static_cast<int>(cfg.eigenvalues.size()) != cfg.d) {
        throw finecalc::ConfigInvalid("--d disagrees with the eigenvalue table in the config");
      }
    }
    if (nodes) cfg.nodes = *nodes;
    if (tol) {
      cfg.tol.identity = cfg.tol.reproduction = cfg.tol.product_rule = *tol;
      cfg.tol.projector = cfg.tol.independence = *tol;
    }
    if (negative_controls) cfg.negative_controls = true;
    if (parallel) cfg.parallel = true;
    if (timings) cfg.timings = true;
    if (!dump_out.empty()) cfg.dump = true;
    if (json_out.empty()) json_out = cfg.output;
    cfg.output = json_out;
    cfg.validate();
  } catch (const finecalc::ConfigInvalid& e) {
    std::cerr << "verify-cli: " << e.what() << '\n';
    return kExitConfig;
  }

  const finecalc::Report report = finecalc::run(cfg);
  if (!quiet) finecalc::emit(std::cout, report, finecalc::Format::text);

  bool written = true;
  if (!json_out.empty()) written &= write_file(json_out, finecalc::emit(report, finecalc::Format::json));
  if (!csv_out.empty()) written &= write_file(csv_out, finecalc::emit(report, finecalc::Format::csv));
  if (!curves_out.empty()) {
    std::ostringstream o;
    finecalc::write_curves_csv(o, report.curves);
    written &= write_file(curves_out, o.str());
  }
  if (!dump_out.empty()) {
    std::ostringstream o;
    finecalc::write_dump(o, report.dumps);
    written &= write_file(dump_out, o.str());
  }
  return report.ok() && written ? 0 : 1;
}
