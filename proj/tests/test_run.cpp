#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lgt/config.hpp"
#include "lgt/freefermion.hpp"
#include "lgt/quench.hpp"
#include "lgt/run.hpp"
#include "lgt/series.hpp"

using namespace lgt;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lgtq_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> problems_of(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& path) {
  for (const auto& p : problems)
    if (p.rfind(path + ":", 0) == 0) return true;
  return false;
}

}  // namespace

TEST_CASE("partner states and N_d sign") {
  CHECK(partner_state("fp+") == "fp-");
  CHECK(partner_state("sl-") == "sl+");
  CHECK(partner_state("vac+") == "vac-");
  CHECK_FALSE(partner_state("CP"));
  CHECK(nd_sign_for("fp+") == +1);
  CHECK(nd_sign_for("CP") == +1);
  CHECK(nd_sign_for("vac+") == -1);
  const auto g = output_grid(1.0, 0.3);
  REQUIRE(g.size() == 5);  // t_max is always the last sample
  CHECK(g[3] == doctest::Approx(0.9));
  CHECK(g.back() == 1.0);
  CHECK(output_grid(1.0, 0.25).back() == 1.0);
}

TEST_CASE("UMPS quench at mu = h = 0 follows the free-fermion oracle") {
  ModelParams p;
  UmpsControls c;
  const auto s = run_quench_umps("fp+", p, 1.0, 0.1, c);
  const auto ref = free_fermion_series(1.0, 0.1);
  REQUIRE(s.size() == ref.size());
  CHECK(s.plus_label == "fp+");
  CHECK(s.minus_label == "fp-");
  CHECK_FALSE(s.horizon);
  CHECK(std::isinf(s.lambda_minus[0][0]));
  CHECK((s.flags[0] & kFlagInfinite) != 0u);
  for (std::size_t k = 1; k < s.size(); ++k) {
    CHECK(std::abs(s.lambda_plus[0][k] - ref.lambda_plus[0][k]) < 2e-3);
    CHECK(std::abs(s.n_d[k] - std::cyl_bessel_j(0.0, 2.0 * s.times[k])) < 1e-5);
    CHECK(std::abs(s.ex[k]) <= 1.0 + 1e-12);
  }
}

TEST_CASE("exact quench reproduces the Bessel occupation difference") {
  ModelParams p;
  ExactControls c;
  c.n_matter = 12;
  const auto s = run_quench_exact("fp+", p, 1.5, 0.25, c);
  CHECK(s.minus_label == "fp-");
  CHECK(s.n_branches == 1);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(s.n_d[k] - std::cyl_bessel_j(0.0, 2.0 * s.times[k])) < 1e-3);
  c.doubling = true;
  const auto d = run_quench_exact("fp+", p, 1.5, 0.25, c);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(d.lambda_plus[0][k] == doctest::Approx(s.lambda_plus[0][k]).epsilon(1e-8));
}

TEST_CASE("quench drivers reject bad arguments") {
  ModelParams p;
  CHECK_THROWS(run_quench_umps("fp+", p, -1.0, 0.1));
  CHECK_THROWS(run_quench_umps("nope", p, 1.0, 0.1));
  UmpsControls c;
  c.n_eigs = 7;
  CHECK_THROWS(c.validate());
  ExactControls e;
  e.n_matter = 40;
  CHECK_THROWS(e.validate());
  ModelParams qlm;
  qlm.kind = ModelKind::U1QLM;
  CHECK_THROWS(run_quench_exact("fp+", qlm, 1.0, 0.1));
}

TEST_CASE("config parsing fills defaults and round-trips") {
  const auto c = parse_run_config(json::parse(R"({"initial": "sl+", "model": {"h": 0.5}})"));
  CHECK(c.initial == "sl+");
  CHECK(c.model.h == 0.5);
  CHECK(c.backend == Backend::UMPS);
  CHECK(c.umps.eigs.seed == c.seed);
  const json doc = to_json(c);
  CHECK(to_json(parse_run_config(doc)) == doc);
  const json manifest = {{"manifest_version", 1}, {"config", doc}};
  CHECK(to_json(parse_run_config_text(manifest.dump())) == doc);
}

TEST_CASE("config errors carry field paths and are all reported") {
  const auto probs = problems_of(json::parse(R"({
    "model": {"kind": "Z3", "J": -1},
    "initial": "fp+",
    "t_max": 0,
    "bogus": 1,
    "controls": {"umps": {"chi_max": 0}}
  })"));
  CHECK(mentions(probs, "model.kind"));
  CHECK(mentions(probs, "t_max"));
  CHECK(mentions(probs, "bogus"));
  CHECK(mentions(probs, "controls.umps.chi_max"));
  CHECK(probs.size() >= 4);

  CHECK(mentions(problems_of(json::object()), "initial"));
  CHECK(mentions(problems_of(json::parse(R"({"initial": "fp+", "dt_output": 0.01, "controls": {"umps": {"dt": 0.02}}})")),
                 "dt_output"));
  // the analytic oracle only describes the free point
  CHECK_FALSE(problems_of(json::parse(R"({"initial": "fp+", "backend": "FreeFermionOracle", "model": {"h": 1}})")).empty());
  CHECK(problems_of(json::parse(R"({"initial": "fp+", "backend": "FreeFermionOracle"})")).empty());
  // QLM needs its own state kind
  CHECK_FALSE(problems_of(json::parse(R"({"initial": "fp+", "model": {"kind": "U1QLM"}})")).empty());
  CHECK_THROWS_AS(parse_run_config_text("{not json"), ConfigError);
}

TEST_CASE("overrides address dotted paths") {
  json doc = {{"initial", "fp+"}};
  apply_override(doc, "model.h", "0.75");
  apply_override(doc, "initial", "sl-");
  apply_override(doc, "controls.umps.doubling", "false");
  const auto c = parse_run_config(doc);
  CHECK(c.model.h == 0.75);
  CHECK(c.initial == "sl-");
  CHECK_FALSE(c.umps.doubling);
  CHECK_THROWS(apply_override(doc, "", "1"));
}

TEST_CASE("run writes artifacts deterministically and a manifest reruns it") {
  const auto dir = scratch("run");
  RunConfig c = parse_run_config(json::parse(R"({"initial": "fp+", "backend": "Exact", "t_max": 1.0, "dt_output": 0.1,
                                                  "controls": {"exact": {"n_matter": 8}}})"));
  c.output_dir = (dir / "a").string();
  const auto r1 = run(c);
  CHECK(r1.exit_code == kExitOk);
  for (const char* f : {"series.csv", "events.json", "manifest.json"}) CHECK(fs::exists(dir / "a" / f));

  c.output_dir = (dir / "b").string();
  run(c);
  CHECK(slurp(dir / "a" / "series.csv") == slurp(dir / "b" / "series.csv"));
  CHECK(slurp(dir / "a" / "events.json") == slurp(dir / "b" / "events.json"));

  auto again = load_run_config((dir / "a" / "manifest.json").string());
  again.output_dir = (dir / "c").string();
  run(again);
  CHECK(slurp(dir / "a" / "series.csv") == slurp(dir / "c" / "series.csv"));

  const json m = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(m["manifest_version"] == 1);
  CHECK(m["code_version"] == kCodeVersion);
  CHECK(m["resonance"]["resonant_fp"].is_null());
  CHECK(m.contains("wall_time_s"));
  fs::remove_all(dir);
}

TEST_CASE("resonance label is recorded at mu = h") {
  RunConfig c = parse_run_config(json::parse(R"({"initial": "fp+", "model": {"mu": 1, "h": 1}})"));
  const auto meta = series_metadata(c);
  CHECK(meta.at("resonant_fp") == "fp-");
}

TEST_CASE("compare reports deviations on the common grid") {
  const auto a = free_fermion_series(2.0, 0.1);
  auto b = a;
  for (auto& v : b.n_d) v += 0.01;
  const auto self = compare_series(a, a, "lambda1_plus", 0.0);
  CHECK(self.pass);
  CHECK(self.max_deviation == 0.0);
  const auto off = compare_series(a, b, "n_diff", 1e-3);
  CHECK_FALSE(off.pass);
  CHECK(off.max_deviation == doctest::Approx(0.01));
  CHECK(compare_series(a, b, "n_diff", 1e-3, 0.0, 0.5).points == 6);

  // coarser grid: only shared times count
  const auto coarse = free_fermion_series(2.0, 0.2);
  CHECK(compare_series(a, coarse, "lambda1_plus", 1e-12).points == coarse.size());

  auto shifted = a;
  for (auto& t : shifted.times) t += 10.0;
  CHECK_THROWS(compare_series(a, shifted, "lambda1_plus", 1.0));
  CHECK_THROWS(compare_series(a, a, "no_such_column", 1.0));
}

TEST_CASE("scan isolates failing points and its counts match the runs") {
  const auto dir = scratch("scan");
  json tmpl = json::parse(R"({"initial": "fp+", "backend": "Exact", "t_max": 1.0, "dt_output": 0.1,
                              "controls": {"exact": {"n_matter": 6}}})");
  tmpl["output_dir"] = dir.string();
  const auto axes = parse_scan_grid(json::parse(R"({"model.h": [0.0, 0.5, "oops"], "model.mu,model.delta": [0, 0.2]})"));
  REQUIRE(axes.size() == 2);
  CHECK(axes[1].paths == std::vector<std::string>{"model.mu", "model.delta"});
  const auto pts = scan(tmpl, axes, 3);
  REQUIRE(pts.size() == 6);
  int failed = 0;
  for (const auto& p : pts) {
    if (p.exit_code == kExitInvalidConfig) {
      ++failed;
      continue;
    }
    CHECK(p.exit_code == kExitOk);
    const auto series = read_series_csv((fs::path(p.output_dir) / "series.csv").string());
    std::map<std::string, int> counts;
    for (const auto& e : detect_events(series)) ++counts[to_string(e.kind)];
    CHECK(counts == p.counts);
  }
  CHECK(failed == 2);
  CHECK(fs::exists(dir / "scan_summary.csv"));
  CHECK(fs::exists(dir / "scan_summary.json"));
  CHECK_THROWS(parse_scan_grid(json::object()));
  CHECK_THROWS(parse_scan_grid(json::parse(R"({"model.h": []})")));
  fs::remove_all(dir);
}
