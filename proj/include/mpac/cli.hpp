#pragma once

#include "mpac/metrics.hpp"
#include "mpac/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mpac::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericalError = 3,
};

int exit_code_for(ErrorKind kind);

struct ConfigEcho {
  std::string data;
  int clusters = 0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  std::string init = "spectral";
  int max_iter = 50;
  double tol = 1e-5;
  bool normalize = true;
  bool header = false;

  friend bool operator==(const ConfigEcho&, const ConfigEcho&) = default;
};

struct TraceEntry {
  int sweep = 0;
  double self_expression = 0.0;
  double regularizer = 0.0;
  double spectral = 0.0;
  double alignment = 0.0;
  double total = 0.0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct ConnectivityEntry {
  int view = 0;
  int zero_eigenvalues = 0;
  std::vector<double> eigenvalues;

  friend bool operator==(const ConnectivityEntry&, const ConnectivityEntry&) = default;
};

struct RunReport {
  ConfigEcho config;
  std::vector<int> labels;
  std::vector<double> weights;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<TraceEntry> objective_trace;
  std::optional<metrics::MetricReport> metrics;  // present iff labels.csv existed
  std::vector<ConnectivityEntry> connectivity;
  double wall_seconds = 0.0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

RunReport make_report(const ConfigEcho& echo, const MpacResult& result,
                      const std::optional<std::vector<int>>& truth, double wall_seconds);

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// Comma-separated list of reals, e.g. "0.1,1,10".
std::vector<double> parse_grid(const std::string& text);

/// Entry point behind the `mpac` binary. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpac::cli
