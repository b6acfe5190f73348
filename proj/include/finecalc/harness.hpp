#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "finecalc/fueter_sce.hpp"
#include "finecalc/operator.hpp"

namespace finecalc {

inline constexpr const char* kArtifactVersion = "finecalc 1.0.0";

struct Tolerances {
  double identity = 1e-9;
  double reproduction = 1e-8;
  /// Minimum error ratio when the node count doubles in the pre-asymptotic range.
  double convergence_ratio = 1e3;
  double product_rule = 1e-7;
  double projector = 1e-7;
  double independence = 1e-9;
  double kernel_order = 1.8;
  /// Extrapolated residual over the finest raw residual.
  double extrapolation_ratio = 1e-2;
  /// How much worse a wrong-constant control must be than the real check.
  double control_margin = 1e3;
  double axiality = 1e-8;
};

struct HarnessConfig {
  int n = 5;
  int d = 2;
  /// Joint eigenvalues of T; empty means drawn from the seed.
  std::vector<JointEigenvalue> eigenvalues;
  /// Use a random real basis V (T not diagonal). Its seed defaults to seed + 1.
  bool random_basis = true;
  std::optional<std::uint64_t> basis_seed;
  std::uint64_t seed = 42;
  double radius_factor = 1.5;
  int nodes = 256;
  int samples = 50;
  int triples = 20;
  Tolerances tol;
  /// Any of "identities", "calculus", "kernels".
  std::vector<std::string> suites = {"identities", "calculus", "kernels"};
  bool negative_controls = false;
  bool parallel = false;
  bool timings = false;
  /// Keep the reproduced operators for a coefficient dump.
  bool dump = false;
  std::string output;

  /// Throws ConfigInvalid.
  void validate() const;
  static HarnessConfig from_json(const std::string& text);
  /// Echo for reports. The output path is left out so that the same run
  /// written to two places gives identical bytes.
  std::string to_json() const;
};

/// The operator described by the config (validated).
ParavectorOperator configured_operator(const HarnessConfig& cfg);

struct Record {
  std::string suite;
  std::string name;
  std::string anchor;
  std::string digest;
  /// "relative_residual", "max_residual", "order", "ratio" or "margin". The
  /// last three pass when residual >= tolerance, the others when residual < tolerance.
  std::string metric = "relative_residual";
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Negative control: the check is expected to fail.
  bool control = false;
  /// Error text when the check threw.
  std::string reason;
  std::optional<double> wall_time;
};

struct Summary {
  int total = 0;
  int passed = 0;
  int failed = 0;
  int controls = 0;
  /// Controls that failed, as they should.
  int controls_rejected = 0;
};

struct Dump {
  std::string name;
  CliffordOperator value;
};

struct Report {
  HarnessConfig config;
  std::vector<Record> records;
  std::vector<ResidualCurve> curves;
  std::vector<Dump> dumps;

  Summary summary() const;
  /// True iff every non-control record passes.
  bool ok() const;
};

bool metric_is_lower_bound(const std::string& metric);

/// Runs the selected suites; module errors become failed records.
Report run(const HarnessConfig& cfg);

enum class Format { json, csv, text };

/// JSON is {artifact_version, config, records, summary} with 17 significant digits.
void emit(std::ostream& out, const Report& report, Format format);
std::string emit(const Report& report, Format format);
/// Parses the records of an emitted JSON report.
std::vector<Record> parse_records(const std::string& json);

/// {"name": {"rank": d, "entries": [[32 coefficients] ...]}} in row-major order.
void write_dump(std::ostream& out, const std::vector<Dump>& dumps);

}  // namespace finecalc
