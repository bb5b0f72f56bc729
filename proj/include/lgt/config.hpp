#pragma once

// Run configuration: a JSON document validated field by field.
//
//   {
//     "model":    {"kind": "Z2LGT", "J": 1, "mu": 0, "h": 0.5, "delta": 0},
//     "initial":  "sl+",
//     "backend":  "UMPS" | "Exact" | "FreeFermionOracle",
//     "t_max": 6, "dt_output": 0.05, "seed": 20240611, "output_dir": "runs/sl",
//     "controls": {
//       "umps":  {"dt", "chi_max", "discarded_weight", "obs_chi_max",
//                 "obs_discarded_weight", "n_eigs", "doubling", "observables",
//                 "eigs_tol"},
//       "exact": {"n_matter", "boundary", "dt", "krylov_dim", "tol", "doubling"}
//     },
//     "detect": {"eps_deg", "min_duration", "crossing_tol", "kink_min_jump", "kink_contrast"}
//   }
//
// Every field except "initial" is optional. Unknown keys are rejected.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgt/dqpt.hpp"
#include "lgt/model.hpp"
#include "lgt/quench.hpp"

namespace lgt {

inline constexpr const char* kCodeVersion = "0.3.0";

enum class Backend { Exact, UMPS, FreeFermionOracle };
std::string to_string(Backend backend);
Backend parse_backend(const std::string& text);

struct RunConfig {
  ModelParams model;
  std::string initial;
  Backend backend = Backend::UMPS;
  double t_max = 4.0;
  double dt_output = 0.05;
  std::uint64_t seed = 20240611;
  std::string output_dir = "lgtq_run";
  UmpsControls umps;
  ExactControls exact;
  DetectOptions detect;
};

/// Collects every validation problem as "field.path: message".
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

RunConfig parse_run_config(const nlohmann::ordered_json& doc);
/// Accepts a config document or a run manifest (uses its "config" member).
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Fully resolved document (all defaults written out); parses back to the same config.
nlohmann::ordered_json to_json(const RunConfig& config);

/// Sets a dotted path ("model.h", "controls.umps.chi_max") to a value given
/// as text; the text is read as JSON when possible and as a string otherwise.
void apply_override(nlohmann::ordered_json& doc, const std::string& path, const std::string& value);

}  // namespace lgt
