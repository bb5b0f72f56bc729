#include "lgt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lgt {

namespace {

using json = nlohmann::ordered_json;

std::string join_problems(const std::vector<std::string>& p) {
  std::string s = "invalid run configuration:";
  for (const auto& x : p) s += "\n  " + x;
  return s;
}

// Reads typed fields out of one JSON object and records every problem with
// its full path instead of stopping at the first.
class Reader {
 public:
  Reader(const json* obj, std::string path, std::vector<std::string>& problems)
      : obj_(obj), path_(std::move(path)), problems_(problems) {
    if (obj_ && !obj_->is_object()) {
      fail("", "must be an object");
      obj_ = nullptr;
    }
  }

  void allow(std::initializer_list<const char*> keys) {
    if (!obj_) return;
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj_->items())
      if (!ok.count(k)) fail(k, "unknown field");
  }

  const json* child(const char* key) const {
    if (!obj_ || !obj_->contains(key)) return nullptr;
    return &obj_->at(key);
  }
  std::string path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const char* key, double& out) {
    if (const json* v = child(key)) {
      if (!v->is_number()) return fail(key, "must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, "must be finite");
    }
  }
  void integer(const char* key, int& out) {
    if (const json* v = child(key)) {
      if (!v->is_number_integer()) return fail(key, "must be an integer");
      out = v->get<int>();
    }
  }
  void uint64(const char* key, std::uint64_t& out) {
    if (const json* v = child(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<long long>() < 0))
        return fail(key, "must be a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const char* key, bool& out) {
    if (const json* v = child(key)) {
      if (!v->is_boolean()) return fail(key, "must be true or false");
      out = v->get<bool>();
    }
  }
  bool string(const char* key, std::string& out) {
    if (const json* v = child(key)) {
      if (!v->is_string()) {
        fail(key, "must be a string");
        return false;
      }
      out = v->get<std::string>();
      return true;
    }
    return false;
  }

  void fail(const std::string& key, const std::string& msg) {
    const std::string p = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
    problems_.push_back((p.empty() ? "<root>" : p) + ": " + msg);
  }

 private:
  const json* obj_;
  std::string path_;
  std::vector<std::string>& problems_;
};

void check(bool ok, Reader& r, const char* key, const std::string& msg) {
  if (!ok) r.fail(key, msg);
}

}  // namespace

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::Exact: return "Exact";
    case Backend::UMPS: return "UMPS";
    case Backend::FreeFermionOracle: return "FreeFermionOracle";
  }
  return "?";
}

Backend parse_backend(const std::string& text) {
  if (text == "Exact" || text == "ED") return Backend::Exact;
  if (text == "UMPS" || text == "MPS") return Backend::UMPS;
  if (text == "FreeFermionOracle" || text == "Oracle") return Backend::FreeFermionOracle;
  throw std::invalid_argument("unknown backend '" + text + "'");
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

RunConfig parse_run_config(const json& doc) {
  std::vector<std::string> problems;
  RunConfig c;
  Reader root(&doc, "", problems);
  root.allow({"model", "initial", "backend", "t_max", "dt_output", "seed", "output_dir", "controls", "detect"});

  Reader model(root.child("model"), "model", problems);
  model.allow({"kind", "J", "mu", "h", "delta"});
  std::string text;
  if (model.string("kind", text)) {
    try {
      c.model.kind = parse_model_kind(text);
    } catch (const std::exception&) {
      model.fail("kind", "must be one of Z2LGT, FreeFermion, U1QLM");
    }
  }
  model.number("J", c.model.J);
  model.number("mu", c.model.mu);
  model.number("h", c.model.h);
  model.number("delta", c.model.delta);
  check(c.model.J > 0.0, model, "J", "must be > 0");

  if (!root.string("initial", c.initial)) {
    if (!root.child("initial")) root.fail("initial", "is required");
  } else {
    try {
      const ModelKind implied = kind_of_name(c.initial);
      const bool qlm_state = implied == ModelKind::U1QLM;
      if (qlm_state != (c.model.kind == ModelKind::U1QLM))
        root.fail("initial", "state '" + c.initial + "' does not belong to model kind " + to_string(c.model.kind));
    } catch (const std::exception&) {
      root.fail("initial", "must be one of fp+, fp-, sl+, sl-, CP, vac+, vac-");
    }
  }
  if (root.string("backend", text)) {
    try {
      c.backend = parse_backend(text);
    } catch (const std::exception&) {
      root.fail("backend", "must be one of Exact, UMPS, FreeFermionOracle");
    }
  }
  root.number("t_max", c.t_max);
  root.number("dt_output", c.dt_output);
  root.uint64("seed", c.seed);
  root.string("output_dir", c.output_dir);
  check(c.t_max > 0.0, root, "t_max", "must be > 0");
  check(c.dt_output > 0.0, root, "dt_output", "must be > 0");
  check(!c.output_dir.empty(), root, "output_dir", "must not be empty");

  Reader controls(root.child("controls"), "controls", problems);
  controls.allow({"umps", "exact"});
  Reader umps(controls.child("umps"), "controls.umps", problems);
  umps.allow({"dt", "chi_max", "discarded_weight", "obs_chi_max", "obs_discarded_weight", "n_eigs", "doubling",
              "observables", "eigs_tol"});
  umps.number("dt", c.umps.dt);
  umps.integer("chi_max", c.umps.rate_trunc.chi_max);
  umps.number("discarded_weight", c.umps.rate_trunc.discarded_weight);
  umps.integer("obs_chi_max", c.umps.obs_trunc.chi_max);
  umps.number("obs_discarded_weight", c.umps.obs_trunc.discarded_weight);
  umps.integer("n_eigs", c.umps.n_eigs);
  umps.boolean("doubling", c.umps.doubling);
  umps.boolean("observables", c.umps.observables);
  umps.number("eigs_tol", c.umps.eigs.tol);
  check(c.umps.dt > 0.0 && c.umps.dt <= 0.05, umps, "dt", "must lie in (0, 0.05]");
  check(c.umps.rate_trunc.chi_max >= 1, umps, "chi_max", "must be >= 1");
  check(c.umps.obs_trunc.chi_max >= 1, umps, "obs_chi_max", "must be >= 1");
  check(c.umps.rate_trunc.discarded_weight >= 0.0 && c.umps.rate_trunc.discarded_weight < 1.0, umps,
        "discarded_weight", "must lie in [0, 1)");
  check(c.umps.obs_trunc.discarded_weight >= 0.0 && c.umps.obs_trunc.discarded_weight < 1.0, umps,
        "obs_discarded_weight", "must lie in [0, 1)");
  check(c.umps.n_eigs >= 2 && c.umps.n_eigs <= 4, umps, "n_eigs", "must be 2, 3 or 4");
  check(c.umps.eigs.tol > 0.0, umps, "eigs_tol", "must be > 0");

  Reader exact(controls.child("exact"), "controls.exact", problems);
  exact.allow({"n_matter", "boundary", "dt", "krylov_dim", "tol", "doubling"});
  exact.integer("n_matter", c.exact.n_matter);
  if (exact.string("boundary", text)) {
    if (text == "Open") c.exact.boundary = Boundary::Open;
    else if (text == "Periodic") c.exact.boundary = Boundary::Periodic;
    else exact.fail("boundary", "must be Open or Periodic");
  }
  exact.number("dt", c.exact.evolution.dt);
  exact.integer("krylov_dim", c.exact.evolution.krylov_dim);
  exact.number("tol", c.exact.evolution.tol);
  exact.boolean("doubling", c.exact.doubling);
  check(c.exact.n_matter >= 2 && c.exact.n_matter <= 16 && c.exact.n_matter % 2 == 0, exact, "n_matter",
        "must be even and lie in [2, 16]");
  check(c.exact.evolution.dt > 0.0, exact, "dt", "must be > 0");
  check(c.exact.evolution.krylov_dim >= 4, exact, "krylov_dim", "must be >= 4");
  check(c.exact.evolution.tol > 0.0, exact, "tol", "must be > 0");

  Reader detect(root.child("detect"), "detect", problems);
  detect.allow({"eps_deg", "min_duration", "crossing_tol", "kink_min_jump", "kink_contrast"});
  detect.number("eps_deg", c.detect.eps_deg);
  detect.number("min_duration", c.detect.min_duration);
  detect.number("crossing_tol", c.detect.crossing_tol);
  detect.number("kink_min_jump", c.detect.kink_min_jump);
  detect.number("kink_contrast", c.detect.kink_contrast);
  check(c.detect.eps_deg > 0.0, detect, "eps_deg", "must be > 0");
  check(c.detect.min_duration > 0.0, detect, "min_duration", "must be > 0");
  check(c.detect.crossing_tol >= 0.0, detect, "crossing_tol", "must be >= 0");
  check(c.detect.kink_min_jump > 0.0, detect, "kink_min_jump", "must be > 0");
  check(c.detect.kink_contrast >= 1.0, detect, "kink_contrast", "must be >= 1");

  // cross-field rules
  if (c.backend == Backend::UMPS && c.dt_output < c.umps.dt)
    root.fail("dt_output", "must be >= controls.umps.dt");
  if (c.backend == Backend::Exact && c.dt_output < c.exact.evolution.dt)
    root.fail("dt_output", "must be >= controls.exact.dt");
  if (c.backend == Backend::FreeFermionOracle) {
    const bool free = c.model.kind == ModelKind::FreeFermion ||
                      (c.model.kind == ModelKind::Z2LGT && c.model.mu == 0.0 && c.model.h == 0.0);
    if (!free) root.fail("backend", "FreeFermionOracle needs model.kind FreeFermion or Z2LGT with mu = h = 0");
  }
  c.umps.eigs.seed = c.seed;

  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

RunConfig parse_run_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<root>: not valid JSON (") + e.what() + ")"});
  }
  if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config")) return parse_run_config(doc["config"]);
  return parse_run_config(doc);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError({"<file>: cannot open " + path});
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config_text(ss.str());
}

json to_json(const RunConfig& c) {
  json doc;
  doc["model"] = {{"kind", to_string(c.model.kind)}, {"J", c.model.J}, {"mu", c.model.mu}, {"h", c.model.h},
                  {"delta", c.model.delta}};
  doc["initial"] = c.initial;
  doc["backend"] = to_string(c.backend);
  doc["t_max"] = c.t_max;
  doc["dt_output"] = c.dt_output;
  doc["seed"] = c.seed;
  doc["output_dir"] = c.output_dir;
  doc["controls"]["umps"] = {{"dt", c.umps.dt},
                             {"chi_max", c.umps.rate_trunc.chi_max},
                             {"discarded_weight", c.umps.rate_trunc.discarded_weight},
                             {"obs_chi_max", c.umps.obs_trunc.chi_max},
                             {"obs_discarded_weight", c.umps.obs_trunc.discarded_weight},
                             {"n_eigs", c.umps.n_eigs},
                             {"doubling", c.umps.doubling},
                             {"observables", c.umps.observables},
                             {"eigs_tol", c.umps.eigs.tol}};
  doc["controls"]["exact"] = {{"n_matter", c.exact.n_matter},
                              {"boundary", to_string(c.exact.boundary)},
                              {"dt", c.exact.evolution.dt},
                              {"krylov_dim", c.exact.evolution.krylov_dim},
                              {"tol", c.exact.evolution.tol},
                              {"doubling", c.exact.doubling}};
  doc["detect"] = {{"eps_deg", c.detect.eps_deg},
                   {"min_duration", c.detect.min_duration},
                   {"crossing_tol", c.detect.crossing_tol},
                   {"kink_min_jump", c.detect.kink_min_jump},
                   {"kink_contrast", c.detect.kink_contrast}};
  return doc;
}

void apply_override(json& doc, const std::string& path, const std::string& value) {
  if (path.empty()) throw ConfigError({"<override>: empty field path"});
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError({path + ": malformed field path"});
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError({path + ": parent is not an object"});
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace lgt
