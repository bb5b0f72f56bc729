#include "lgt/run.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lgt/series.hpp"

namespace lgt {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string number_text(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

std::map<std::string, std::string> series_metadata(const RunConfig& c) {
  std::map<std::string, std::string> m;
  m["backend"] = to_string(c.backend);
  m["model"] = to_string(c.model.kind) + " J=" + number_text(c.model.J) + " mu=" + number_text(c.model.mu) +
               " h=" + number_text(c.model.h) + " delta=" + number_text(c.model.delta);
  const auto resonant = resonant_fp_state(c.model);
  m["resonant_fp"] = resonant.value_or("none");
  m["seed"] = std::to_string(c.seed);
  m["code_version"] = kCodeVersion;
  return m;
}

RunResult execute(const RunConfig& c) {
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  switch (c.backend) {
    case Backend::UMPS: {
      UmpsControls u = c.umps;
      u.eigs.seed = c.seed;
      r.series = run_quench_umps(c.initial, c.model, c.t_max, c.dt_output, u);
      break;
    }
    case Backend::Exact:
      r.series = run_quench_exact(c.initial, c.model, c.t_max, c.dt_output, c.exact);
      break;
    case Backend::FreeFermionOracle:
      r.series = free_fermion_series(c.t_max, c.dt_output);
      r.series.plus_label = c.initial;
      break;
  }
  r.events = detect_events(r.series, c.detect);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json diag;
  double max_trunc = 0.0;
  std::map<std::string, int> flag_counts{{"infinite", 0}, {"saturated", 0}, {"not_converged", 0}, {"missing_branch", 0}};
  for (std::size_t k = 0; k < r.series.size(); ++k) {
    if (std::isfinite(r.series.trunc_err[k])) max_trunc = std::max(max_trunc, r.series.trunc_err[k]);
    const auto f = r.series.flags[k];
    if (f & kFlagInfinite) ++flag_counts["infinite"];
    if (f & kFlagSaturated) ++flag_counts["saturated"];
    if (f & kFlagNotConverged) ++flag_counts["not_converged"];
    if (f & kFlagMissingBranch) ++flag_counts["missing_branch"];
  }
  diag["samples"] = r.series.size();
  diag["max_trunc_err"] = max_trunc;
  diag["flag_counts"] = flag_counts;
  diag["horizon"] = r.series.horizon ? json(*r.series.horizon) : json(nullptr);
  diag["horizon_reason"] = r.series.horizon_reason;

  std::map<std::string, int> counts{{"Branch", 0}, {"Manifold", 0}, {"DegeneracyStart", 0}, {"DegeneracyEnd", 0}};
  for (const auto& e : r.events) ++counts[to_string(e.kind)];

  const auto resonant = resonant_fp_state(c.model);
  r.manifest["manifest_version"] = 1;
  r.manifest["code_version"] = kCodeVersion;
  r.manifest["config"] = to_json(c);
  r.manifest["resonance"] = {{"resonant_fp", resonant ? json(*resonant) : json(nullptr)},
                             {"manifold_plus", r.series.plus_label},
                             {"manifold_minus", r.series.has_minus() ? json(r.series.minus_label) : json(nullptr)}};
  r.manifest["normalization"] = {{"time", "1/J"}, {"rates", "per matter site"}, {"hopping", "-(J/2) per bond"}};
  r.manifest["wall_time_s"] = wall;
  r.manifest["diagnostics"] = diag;
  r.manifest["event_counts"] = counts;
  r.manifest["artifacts"] = {{"series", "series.csv"}, {"events", "events.json"}};

  if (r.series.horizon) {
    r.exit_code = kExitBackendFailure;
    r.diagnostic = "backend stopped at t=" + number_text(*r.series.horizon) + ": " + r.series.horizon_reason;
  }
  return r;
}

RunResult run(const RunConfig& c) {
  RunResult r = execute(c);
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  write_series_csv((dir / "series.csv").string(), r.series, series_metadata(c));
  write_text(dir / "events.json", events_to_json(r.events, r.series, c.detect));
  write_text(dir / "manifest.json", r.manifest.dump(2) + "\n");
  return r;
}

std::vector<double> series_column(const ReturnRateSeries& s, const std::string& q) {
  if (q == "total_rate") return total_rate(s);
  if (q == "ex_flux") return s.ex;
  if (q == "ex_flux_stag") return s.ex_stag;
  if (q == "n_diff") return s.n_d;
  if (q == "trunc_err") return s.trunc_err;
  if (q.rfind("lambda", 0) == 0) {
    const auto us = q.find('_');
    if (us != std::string::npos && us > 6) {
      const int n = std::atoi(q.substr(6, us - 6).c_str());
      const std::string side = q.substr(us + 1);
      const auto& arr = side == "plus" ? s.lambda_plus : side == "minus" ? s.lambda_minus
                                                                          : throw std::invalid_argument("bad column " + q);
      if (n < 1 || n > static_cast<int>(arr.size()))
        throw std::invalid_argument("series has no column " + q);
      return arr[n - 1];
    }
  }
  throw std::invalid_argument("unknown quantity '" + q + "'");
}

CompareReport compare_series(const ReturnRateSeries& a, const ReturnRateSeries& b, const std::string& quantity,
                             double tol, double t_min, double t_max) {
  const auto ya = series_column(a, quantity), yb = series_column(b, quantity);
  CompareReport rep;
  rep.quantity = quantity;
  rep.tol = tol;
  rep.t_min = std::numeric_limits<double>::infinity();
  rep.t_max = -std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  double sum = 0.0;
  std::size_t common = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a.times[i];
    while (j < b.size() && b.times[j] < t - 1e-9) ++j;
    if (j >= b.size() || std::abs(b.times[j] - t) > 1e-9) continue;
    if (t < t_min - 1e-12 || t > t_max + 1e-12) continue;
    ++common;
    if (!std::isfinite(ya[i]) || !std::isfinite(yb[j])) {
      ++rep.skipped;
      continue;
    }
    const double dev = std::abs(ya[i] - yb[j]);
    rep.max_deviation = std::max(rep.max_deviation, dev);
    sum += dev;
    ++rep.points;
    rep.t_min = std::min(rep.t_min, t);
    rep.t_max = std::max(rep.t_max, t);
  }
  if (common == 0) throw std::invalid_argument("series have no common time points in the requested window");
  rep.mean_deviation = rep.points ? sum / static_cast<double>(rep.points) : 0.0;
  rep.pass = rep.points > 0 && rep.max_deviation <= tol;
  return rep;
}

json to_json(const CompareReport& r) {
  return {{"quantity", r.quantity},
          {"tol", r.tol},
          {"t_min", r.points ? json(r.t_min) : json(nullptr)},
          {"t_max", r.points ? json(r.t_max) : json(nullptr)},
          {"points", r.points},
          {"skipped", r.skipped},
          {"max_deviation", r.max_deviation},
          {"mean_deviation", r.mean_deviation},
          {"pass", r.pass}};
}

std::vector<ScanAxis> parse_scan_grid(const json& grid) {
  if (!grid.is_object() || grid.empty()) throw ConfigError({"grid: must be a non-empty object"});
  std::vector<ScanAxis> axes;
  for (const auto& [key, values] : grid.items()) {
    ScanAxis ax;
    std::stringstream ss(key);
    std::string p;
    while (std::getline(ss, p, ',')) {
      if (p.empty()) throw ConfigError({"grid." + key + ": empty path"});
      ax.paths.push_back(p);
    }
    if (!values.is_array() || values.empty()) throw ConfigError({"grid." + key + ": must be a non-empty array"});
    for (const auto& v : values) ax.values.push_back(v);
    axes.push_back(std::move(ax));
  }
  return axes;
}

int worker_budget() {
  if (const char* env = std::getenv("LGTQ_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ScanPoint> scan(const json& tmpl, const std::vector<ScanAxis>& axes, int workers) {
  if (axes.empty()) throw ConfigError({"grid: must contain at least one axis"});
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.values.size();
  const std::string base = tmpl.contains("output_dir") && tmpl["output_dir"].is_string()
                               ? tmpl["output_dir"].get<std::string>() : std::string("lgtq_scan");

  std::vector<ScanPoint> points(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ScanPoint& pt = points[idx];
    pt.index = idx;
    std::size_t rest = idx;
    // last axis varies fastest
    std::vector<std::size_t> pick(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      pick[a] = rest % axes[a].values.size();
      rest /= axes[a].values.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a)
      for (const auto& p : axes[a].paths) pt.assignment.emplace_back(p, axes[a].values[pick[a]]);
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu", idx);
    pt.output_dir = (fs::path(base) / name).string();
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      ScanPoint& pt = points[i];
      try {
        json doc = tmpl;
        for (const auto& [path, value] : pt.assignment) apply_override(doc, path, value.dump());
        doc["output_dir"] = pt.output_dir;
        const RunConfig cfg = parse_run_config(doc);
        const RunResult r = run(cfg);
        pt.exit_code = r.exit_code;
        pt.error = r.diagnostic;
        for (const auto& e : r.events) ++pt.counts[to_string(e.kind)];
      } catch (const ConfigError& e) {
        pt.exit_code = kExitInvalidConfig;
        pt.error = e.what();
      } catch (const std::exception& e) {
        pt.exit_code = kExitBackendFailure;
        pt.error = e.what();
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  fs::create_directories(base);
  std::ostringstream csv;
  csv << "point,assignment,exit_code,Branch,Manifold,DegeneracyStart,DegeneracyEnd,output_dir\n";
  json summary = json::array();
  for (const auto& pt : points) {
    std::string assign;
    json a = json::object();
    for (const auto& [p, v] : pt.assignment) {
      assign += (assign.empty() ? "" : " ") + p + "=" + v.dump();
      a[p] = v;
    }
    auto count = [&](const char* k) {
      const auto it = pt.counts.find(k);
      return it == pt.counts.end() ? 0 : it->second;
    };
    csv << pt.index << ",\"" << assign << "\"," << pt.exit_code << "," << count("Branch") << "," << count("Manifold")
        << "," << count("DegeneracyStart") << "," << count("DegeneracyEnd") << "," << pt.output_dir << "\n";
    summary.push_back({{"point", pt.index},
                       {"assignment", a},
                       {"exit_code", pt.exit_code},
                       {"error", pt.error},
                       {"counts", {{"Branch", count("Branch")}, {"Manifold", count("Manifold")},
                                   {"DegeneracyStart", count("DegeneracyStart")}, {"DegeneracyEnd", count("DegeneracyEnd")}}},
                       {"output_dir", pt.output_dir}});
  }
  write_text(fs::path(base) / "scan_summary.csv", csv.str());
  write_text(fs::path(base) / "scan_summary.json", summary.dump(2) + "\n");
  return points;
}

}  // namespace lgt
