#pragma once

// Orchestration: one run (backend dispatch + artifacts), series comparison
// and parameter scans.
//
// A run directory holds
//   series.csv    - the ReturnRateSeries (see series.hpp)
//   events.json   - detected DQPT events (schema_version 1)
//   manifest.json - resolved config, code version, resonance labels, wall
//                   time and diagnostics; `lgtq simulate --config` accepts it.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lgt/config.hpp"
#include "lgt/dqpt.hpp"
#include "lgt/quench.hpp"

namespace lgt {

/// Exit codes shared by the library and the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalidConfig = 1, kExitBackendFailure = 2, kExitCompareFailed = 3 };

struct RunResult {
  ReturnRateSeries series;
  std::vector<DQPTEvent> events;
  nlohmann::ordered_json manifest;
  int exit_code = kExitOk;
  std::string diagnostic;
};

/// Runs the backend and the detector without touching the file system.
RunResult execute(const RunConfig& config);

/// execute() plus series.csv, events.json and manifest.json in config.output_dir.
RunResult run(const RunConfig& config);

/// Metadata lines written into series.csv (deterministic: no timings).
std::map<std::string, std::string> series_metadata(const RunConfig& config);

struct CompareReport {
  std::string quantity;
  double tol = 0.0;
  double t_min = 0.0, t_max = 0.0;  // compared window
  std::size_t points = 0;           // common finite samples
  std::size_t skipped = 0;          // common samples with a non-finite value
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
  bool pass = false;
};

/// Column of a series by CSV name (lambda1_plus, ..., ex_flux, n_diff,
/// trunc_err) or "total_rate".
std::vector<double> series_column(const ReturnRateSeries& series, const std::string& quantity);

/// Deviation of one quantity on the common time grid (times equal to 1e-9),
/// restricted to [t_min, t_max]. Throws when the grids do not overlap.
CompareReport compare_series(const ReturnRateSeries& a, const ReturnRateSeries& b, const std::string& quantity,
                             double tol, double t_min = 0.0, double t_max = 1e300);
nlohmann::ordered_json to_json(const CompareReport& report);

/// Scan axes: each entry assigns the same values to one or more dotted
/// config paths ("model.h", or tied paths like {"model.mu", "model.h"}).
struct ScanAxis {
  std::vector<std::string> paths;
  std::vector<nlohmann::ordered_json> values;
};
/// Parses {"model.h": [0.5, 1.0], "model.mu,model.h": [0.75, 2]}.
std::vector<ScanAxis> parse_scan_grid(const nlohmann::ordered_json& grid);

struct ScanPoint {
  std::size_t index = 0;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> assignment;
  std::string output_dir;
  int exit_code = kExitOk;
  std::string error;
  std::map<std::string, int> counts;  // events by kind
};

/// One run per grid point (Cartesian product of the axes) in
/// <template output_dir>/point_NNN, at most `workers` at a time. Failures
/// are recorded per point. Writes scan_summary.csv and scan_summary.json.
std::vector<ScanPoint> scan(const nlohmann::ordered_json& config_template, const std::vector<ScanAxis>& axes,
                            int workers);

/// Worker budget from LGTQ_WORKERS (default: hardware concurrency, at least 1).
int worker_budget();

}  // namespace lgt
