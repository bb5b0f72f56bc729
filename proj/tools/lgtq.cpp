// lgtq: quench simulations and DQPT analysis from the command line.
//
//   lgtq simulate --config run.json --set model.h=0.5 --t-max 6
//   lgtq scan     --config template.json --grid grid.json
//   lgtq detect   --series run/series.csv
//   lgtq compare  a/series.csv b/series.csv --quantity lambda1_plus --tol 1e-2
//   lgtq oracle   --t-max 4 --out ff.csv
//
// Exit codes: 0 ok, 1 invalid configuration or usage, 2 backend failure
// (including an early horizon), 3 comparison outside tolerance.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgt/config.hpp"
#include "lgt/dqpt.hpp"
#include "lgt/run.hpp"
#include "lgt/series.hpp"

namespace {

using json = nlohmann::ordered_json;

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw lgt::ConfigError({"<file>: cannot open " + path});
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw lgt::ConfigError({"<file>: " + path + " is not valid JSON (" + e.what() + ")"});
  }
}

// Config document options shared by simulate and scan.
struct DocOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> kind, initial, backend, output_dir;
  std::optional<double> J, mu, h, delta, t_max, dt_output, dt;
  std::optional<std::uint64_t> seed;
  std::optional<int> chi_max, n_matter;

  void add_to(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON config (or a run manifest)");
    app->add_option("--set", sets, "override a field: dotted.path=value (repeatable)");
    app->add_option("--model", kind, "Z2LGT | U1QLM | FreeFermion");
    app->add_option("--initial", initial, "initial state (fp+, fp-, sl+, sl-, vac+, vac-, CP)");
    app->add_option("--backend", backend, "UMPS | Exact | FreeFermionOracle");
    app->add_option("-o,--output-dir", output_dir, "output directory");
    app->add_option("--J", J, "hopping");
    app->add_option("--mu", mu, "staggered mass");
    app->add_option("--h-field", h, "electric field coupling (model.h)");
    app->add_option("--delta", delta, "resonance detuning");
    app->add_option("--t-max", t_max, "final time (1/J)");
    app->add_option("--dt-output", dt_output, "output spacing (1/J)");
    app->add_option("--dt", dt, "integrator step of the selected backend");
    app->add_option("--seed", seed, "eigensolver seed");
    app->add_option("--chi-max", chi_max, "UMPS bond dimension cap (rate track)");
    app->add_option("--n-matter", n_matter, "Exact backend chain length");
  }

  json build() const {
    json doc = json::object();
    if (!config_path.empty()) {
      doc = read_json_file(config_path);
      if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config")) doc = json(doc["config"]);
    }
    auto put = [&](const std::string& path, const json& v) { lgt::apply_override(doc, path, v.dump()); };
    if (kind) put("model.kind", *kind);
    if (J) put("model.J", *J);
    if (mu) put("model.mu", *mu);
    if (h) put("model.h", *h);
    if (delta) put("model.delta", *delta);
    if (initial) put("initial", *initial);
    if (backend) put("backend", *backend);
    if (output_dir) put("output_dir", *output_dir);
    if (t_max) put("t_max", *t_max);
    if (dt_output) put("dt_output", *dt_output);
    if (seed) put("seed", *seed);
    if (chi_max) put("controls.umps.chi_max", *chi_max);
    if (n_matter) put("controls.exact.n_matter", *n_matter);
    if (dt) {
      const std::string b = doc.contains("backend") && doc["backend"].is_string() ? doc["backend"].get<std::string>()
                                                                                  : "UMPS";
      put(lgt::parse_backend(b) == lgt::Backend::Exact ? "controls.exact.dt" : "controls.umps.dt", *dt);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw lgt::ConfigError({"--set: expected path=value, got '" + s + "'"});
      lgt::apply_override(doc, s.substr(0, eq), s.substr(eq + 1));
    }
    return doc;
  }
};

struct DetectFlags {
  std::optional<double> eps_deg, min_duration, crossing_tol;
  void add_to(CLI::App* app) {
    app->add_option("--eps-deg", eps_deg, "degeneracy threshold (rate units)");
    app->add_option("--min-duration", min_duration, "shortest degeneracy interval (1/J)");
    app->add_option("--crossing-tol", crossing_tol, "gap-closing extrapolation tolerance");
  }
  void apply(lgt::DetectOptions& o) const {
    if (eps_deg) o.eps_deg = *eps_deg;
    if (min_duration) o.min_duration = *min_duration;
    if (crossing_tol) o.crossing_tol = *crossing_tol;
    o.validate();
  }
};

void print_problems(const lgt::ConfigError& e) {
  std::cerr << "invalid configuration:\n";
  for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time dynamics and DQPT detection for 1+1D lattice gauge theories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lgt::kCodeVersion));

  DocOptions sim_doc;
  bool dry_run = false;
  auto* sim = app.add_subcommand("simulate", "run one quench and write series.csv, events.json, manifest.json");
  sim_doc.add_to(sim);
  sim->add_flag("--dry-run", dry_run, "print the resolved config and exit");

  DocOptions scan_doc;
  std::string grid_path;
  std::vector<std::string> axes_text;
  int workers = 0;
  auto* scan = app.add_subcommand("scan", "run a parameter grid");
  scan_doc.add_to(scan);
  scan->add_option("--grid", grid_path, "JSON grid: {\"model.h\": [..], \"model.mu,model.h\": [..]}");
  scan->add_option("--axis", axes_text, "inline axis: path[,path]=v1:v2:... (repeatable)");
  scan->add_option("--workers", workers, "concurrent runs (default LGTQ_WORKERS or all cores)");

  std::string detect_series, detect_out;
  DetectFlags detect_flags;
  auto* detect = app.add_subcommand("detect", "detect DQPT events in a stored series");
  detect->add_option("--series", detect_series, "series.csv")->required()->check(CLI::ExistingFile);
  detect->add_option("--out", detect_out, "write events.json here instead of stdout");
  detect_flags.add_to(detect);

  std::string cmp_a, cmp_b, cmp_quantity = "lambda1_plus";
  double cmp_tol = 1e-2, cmp_tmin = 0.0, cmp_tmax = 1e300;
  auto* compare = app.add_subcommand("compare", "compare one quantity of two series");
  compare->add_option("a", cmp_a, "first series.csv")->required()->check(CLI::ExistingFile);
  compare->add_option("b", cmp_b, "second series.csv")->required()->check(CLI::ExistingFile);
  compare->add_option("--quantity", cmp_quantity, "column name or total_rate");
  compare->add_option("--tol", cmp_tol, "largest accepted absolute deviation");
  compare->add_option("--t-min", cmp_tmin, "window start");
  compare->add_option("--t-max", cmp_tmax, "window end");

  double or_tmax = 4.0, or_dt = 0.01;
  std::string or_out;
  auto* oracle = app.add_subcommand("oracle", "analytic free-fermion series (mu = h = 0)");
  oracle->add_option("--t-max", or_tmax, "final time");
  oracle->add_option("--dt-output", or_dt, "output spacing");
  oracle->add_option("--out", or_out, "series.csv path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? lgt::kExitOk : lgt::kExitInvalidConfig;
  }

  try {
    if (*sim) {
      const lgt::RunConfig cfg = lgt::parse_run_config(sim_doc.build());
      if (dry_run) {
        std::cout << lgt::to_json(cfg).dump(2) << "\n";
        return lgt::kExitOk;
      }
      const lgt::RunResult r = lgt::run(cfg);
      std::cout << "wrote " << cfg.output_dir << " (" << r.series.size() << " samples, " << r.events.size()
                << " events)\n";
      if (r.exit_code != lgt::kExitOk) std::cerr << r.diagnostic << "\n";
      return r.exit_code;
    }

    if (*scan) {
      const json tmpl = scan_doc.build();
      json grid = json::object();
      if (!grid_path.empty()) grid = read_json_file(grid_path);
      for (const auto& a : axes_text) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw lgt::ConfigError({"--axis: expected path=v1:v2, got '" + a + "'"});
        json values = json::array();
        std::stringstream ss(a.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ':')) {
          try {
            values.push_back(json::parse(item));
          } catch (const json::parse_error&) {
            values.push_back(item);
          }
        }
        grid[a.substr(0, eq)] = values;
      }
      lgt::parse_run_config(tmpl);  // the template itself must be valid
      const auto axes = lgt::parse_scan_grid(grid);
      const auto points = lgt::scan(tmpl, axes, workers > 0 ? workers : lgt::worker_budget());
      int failed = 0;
      for (const auto& p : points) {
        if (p.exit_code != lgt::kExitOk) {
          ++failed;
          std::cerr << "point " << p.index << ": " << p.error << "\n";
        }
      }
      std::cout << points.size() << " points, " << failed << " failed\n";
      return failed ? lgt::kExitBackendFailure : lgt::kExitOk;
    }

    if (*detect) {
      lgt::DetectOptions opts;
      detect_flags.apply(opts);
      const auto series = lgt::read_series_csv(detect_series);
      const auto events = lgt::detect_events(series, opts);
      const std::string text = lgt::events_to_json(events, series, opts);
      if (detect_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(detect_out);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + detect_out);
      }
      return lgt::kExitOk;
    }

    if (*compare) {
      const auto a = lgt::read_series_csv(cmp_a);
      const auto b = lgt::read_series_csv(cmp_b);
      const auto rep = lgt::compare_series(a, b, cmp_quantity, cmp_tol, cmp_tmin, cmp_tmax);
      std::cout << lgt::to_json(rep).dump(2) << "\n";
      return rep.pass ? lgt::kExitOk : lgt::kExitCompareFailed;
    }

    if (*oracle) {
      const auto s = lgt::free_fermion_series(or_tmax, or_dt);
      const lgt::SeriesMetadata meta{{"backend", "FreeFermionOracle"}, {"code_version", lgt::kCodeVersion}};
      if (or_out.empty())
        lgt::write_series_csv(std::cout, s, meta);
      else
        lgt::write_series_csv(or_out, s, meta);
      return lgt::kExitOk;
    }
  } catch (const lgt::ConfigError& e) {
    print_problems(e);
    return lgt::kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lgt::kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lgt::kExitBackendFailure;
  }
  return lgt::kExitOk;
}
