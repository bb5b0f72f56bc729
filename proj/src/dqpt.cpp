#include "lgt/dqpt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace lgt {

namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Kink {
  std::size_t k;
  double time;
  double width;  // localization half-width
};

// Slope jump between the secant through (k-2, k-1) and the one through
// (k+1, k+2); a kink anywhere in [t_{k-1}, t_{k+1}] shows up as a jump that
// does not shrink with the grid spacing.
std::vector<Kink> find_kinks(const std::vector<double>& t, const std::vector<double>& y, const DetectOptions& o) {
  const std::size_t n = t.size();
  std::vector<Kink> out;
  if (n < 5) return out;
  std::vector<double> jump(n, kNaN);
  for (std::size_t k = 2; k + 2 < n; ++k) {
    bool ok = true;
    for (std::size_t j = k - 2; j <= k + 2; ++j) ok = ok && std::isfinite(y[j]);
    if (!ok) continue;
    const double sl = (y[k - 1] - y[k - 2]) / (t[k - 1] - t[k - 2]);
    const double sr = (y[k + 2] - y[k + 1]) / (t[k + 2] - t[k + 1]);
    jump[k] = sr - sl;
  }
  constexpr std::size_t window = 12;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    const double a = std::abs(jump[k]);
    if (!std::isfinite(a) || a < o.kink_min_jump) continue;
    // both neighbourhoods must be resolved: next to a gap in the data (e.g.
    // the infinite rate at t = 0) a steep smooth curve looks like a maximum
    bool local_max = true;
    for (std::size_t j = k - 2; j <= k + 2 && local_max; ++j) {
      if (j == k) continue;
      if (!std::isfinite(jump[j])) {
        local_max = false;
        break;
      }
      const double b = std::abs(jump[j]);
      local_max = j < k ? a > b : a >= b;
    }
    if (!local_max) continue;
    std::vector<double> bg;
    for (std::size_t j = (k > window ? k - window : 0); j < std::min(n, k + window + 1); ++j)
      if ((j + 4 <= k || j >= k + 4) && std::isfinite(jump[j])) bg.push_back(std::abs(jump[j]));
    if (!bg.empty()) {
      std::nth_element(bg.begin(), bg.begin() + bg.size() / 2, bg.end());
      if (a < o.kink_contrast * bg[bg.size() / 2]) continue;
    }
    const double sl = (y[k - 1] - y[k - 2]) / (t[k - 1] - t[k - 2]);
    const double sr = (y[k + 2] - y[k + 1]) / (t[k + 2] - t[k + 1]);
    double tc = (y[k + 1] - y[k - 1] - sr * t[k + 1] + sl * t[k - 1]) / (sl - sr);
    tc = std::clamp(tc, t[k - 1], t[k + 1]);
    // a one-sided singular slope (square-root cusp) lights up neighbouring
    // windows too; keep the strongest jump of each cluster
    if (!out.empty() && k - out.back().k <= 3) {
      if (a <= std::abs(jump[out.back().k])) continue;
      out.pop_back();
    }
    out.push_back({k, tc, 0.5 * (t[k + 1] - t[k - 1])});
  }
  return out;
}

// Intersection of the secants through (i0, i1) and (j0, j1) of y.
bool v_intersection(const std::vector<double>& t, const std::vector<double>& y, std::size_t i0, std::size_t i1,
                    std::size_t j0, std::size_t j1, double& tc, double& value) {
  for (std::size_t i : {i0, i1, j0, j1})
    if (!std::isfinite(y[i])) return false;
  const double sl = (y[i1] - y[i0]) / (t[i1] - t[i0]);
  const double sr = (y[j1] - y[j0]) / (t[j1] - t[j0]);
  if (!(sl < 0.0 && sr > 0.0)) return false;
  tc = (y[j0] - y[i1] - sr * t[j0] + sl * t[i1]) / (sl - sr);
  value = y[i1] + sl * (tc - t[i1]);
  return true;
}

// Cubic through (t, -d) at k-2, k-1 and (t, +d) at k+1, k+2: a crossing of
// two smooth branches makes this a smooth signed gap. Returns its root in
// [t_{k-1}, t_{k+1}] and the mismatch between |p(t_k)| and the sampled d_k
// (an avoided crossing leaves d_k well above the interpolated zero).
bool unfolded_root(const std::vector<double>& t, const std::vector<double>& d, std::size_t k, double& tc,
                   double& mismatch) {
  const std::size_t idx[4] = {k - 2, k - 1, k + 1, k + 2};
  double x[4], y[4];
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(d[idx[i]])) return false;
    x[i] = t[idx[i]];
    y[i] = i < 2 ? -d[idx[i]] : d[idx[i]];
  }
  auto p = [&](double s) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      double w = y[i];
      for (int j = 0; j < 4; ++j)
        if (j != i) w *= (s - x[j]) / (x[i] - x[j]);
      sum += w;
    }
    return sum;
  };
  double lo = x[1], hi = x[2];
  if (!(p(lo) < 0.0 && p(hi) > 0.0)) return false;
  for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (p(mid) < 0.0 ? lo : hi) = mid;
  }
  tc = 0.5 * (lo + hi);
  mismatch = std::abs(std::abs(p(t[k])) - d[k]);
  return true;
}

bool has_second_branch(const std::vector<std::vector<double>>& lambda) {
  if (lambda.size() < 2) return false;
  for (double v : lambda[1])
    if (std::isfinite(v)) return true;
  return false;
}

std::vector<double> gap_of(const std::vector<std::vector<double>>& lambda) {
  const std::size_t n = lambda[0].size();
  std::vector<double> d(n, kNaN);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = lambda[0][k], b = lambda[1][k];
    if (!std::isfinite(a)) continue;
    d[k] = std::isinf(b) && b > 0 ? std::numeric_limits<double>::infinity() : b - a;
  }
  return d;
}

struct Run {
  std::size_t a, b;  // inclusive sample range
};

std::vector<Run> closed_runs(const std::vector<double>& d, double eps) {
  std::vector<Run> runs;
  std::size_t k = 0;
  while (k < d.size()) {
    if (std::isfinite(d[k]) && d[k] < eps) {
      std::size_t b = k;
      while (b + 1 < d.size() && std::isfinite(d[b + 1]) && d[b + 1] < eps) ++b;
      runs.push_back({k, b});
      k = b + 1;
    } else {
      ++k;
    }
  }
  return runs;
}

void branch_events(const std::vector<double>& t, const std::vector<std::vector<double>>& lambda,
                   const std::string& label, const DetectOptions& o, std::vector<DQPTEvent>& out) {
  if (lambda.empty()) return;
  const std::size_t n = t.size();
  const auto kinks = find_kinks(t, lambda[0], o);
  if (!has_second_branch(lambda)) {
    // single branch: every slope discontinuity of lambda_1 is a branch point
    for (const auto& kk : kinks) out.push_back({kk.time, EventKind::Branch, label, kk.width});
    return;
  }
  const auto d = gap_of(lambda);
  std::vector<DQPTEvent> found;

  // short closed stretches of the sorted gap: the branches touched
  for (const Run& r : closed_runs(d, o.eps_deg)) {
    if (r.a == 0 || r.b + 1 == n) continue;  // cannot tell a touch from a boundary degeneracy
    if (t[r.b] - t[r.a] >= o.min_duration) continue;
    double tc = 0.5 * (t[r.a] + t[r.b]), v = 0.0, width = 0.5 * (t[r.b] - t[r.a]);
    if (r.a >= 2 && r.b + 2 < n) {
      double tv, vv;
      if (v_intersection(t, d, r.a - 2, r.a - 1, r.b + 1, r.b + 2, tv, vv) && tv >= t[r.a - 1] && tv <= t[r.b + 1]) {
        tc = tv;
        v = std::abs(vv);
        width = 0.0;
      }
    }
    found.push_back({tc, EventKind::Branch, label, std::max(v, width)});
  }
  // open local minima where the gap, unfolded to a signed difference, passes
  // through zero between the neighbouring samples
  for (std::size_t k = 2; k + 2 < n; ++k) {
    if (!std::isfinite(d[k]) || d[k] < o.eps_deg) continue;
    if (!(std::isfinite(d[k - 1]) && std::isfinite(d[k + 1]) && d[k] < d[k - 1] && d[k] <= d[k + 1])) continue;
    if (d[k - 1] < o.eps_deg || d[k + 1] < o.eps_deg) continue;
    double tc, v;
    if (!unfolded_root(t, d, k, tc, v)) continue;
    // cubic interpolation error grows with the neighbouring gaps; an avoided
    // crossing narrower than a few percent of them is not resolvable anyway
    if (v > std::max({o.crossing_tol, 0.25 * d[k], 0.05 * std::min(d[k - 1], d[k + 1])})) continue;
    found.push_back({tc, EventKind::Branch, label, v});
  }
  // kinks of lambda_1 next to a resolved degeneracy (no separate second branch there)
  for (const auto& kk : kinks) {
    const std::size_t lo = kk.k >= 2 ? kk.k - 2 : 0, hi = std::min(n - 1, kk.k + 2);
    const bool far_closed = (std::isfinite(d[lo]) && d[lo] < o.eps_deg) || (std::isfinite(d[hi]) && d[hi] < o.eps_deg);
    if (!far_closed) continue;
    const double step = t[hi] - t[lo];
    const bool dup = std::any_of(found.begin(), found.end(),
                                 [&](const DQPTEvent& e) { return std::abs(e.time - kk.time) <= step; });
    if (!dup) found.push_back({kk.time, EventKind::Branch, label, kk.width});
  }
  out.insert(out.end(), found.begin(), found.end());
}

void manifold_events(const ReturnRateSeries& s, const DetectOptions& o, std::vector<DQPTEvent>& out) {
  if (!s.has_minus() || s.lambda_plus.empty() || s.lambda_minus.empty()) return;
  const auto& t = s.times;
  const std::size_t n = t.size();
  std::vector<double> diff(n, kNaN);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = s.lambda_plus[0][k], b = s.lambda_minus[0][k];
    if (std::isnan(a) || std::isnan(b) || (std::isinf(a) && std::isinf(b))) continue;
    diff[k] = a - b;
  }
  auto cls = [&](std::size_t k) -> int {
    if (std::isnan(diff[k])) return 2;  // unknown
    if (diff[k] > o.eps_deg) return 1;
    if (diff[k] < -o.eps_deg) return -1;
    return 0;
  };
  std::optional<std::size_t> last;  // last sample with a resolved sign
  for (std::size_t k = 0; k < n; ++k) {
    const int c = cls(k);
    if (c == 2 || c == 0) continue;
    if (last && cls(*last) != c) {
      const std::size_t i = *last, j = k;
      // degenerate stretch between the two resolved samples
      double unresolved = 0.0;
      for (std::size_t m = i + 1; m < j; ++m)
        if (cls(m) == 0) unresolved += t[m + 1] - t[m];
      if (unresolved < o.min_duration) {
        // first raw sign change inside [i, j]
        double tc = 0.5 * (t[i] + t[j]), width = 0.5 * (t[j] - t[i]);
        for (std::size_t m = i; m < j; ++m) {
          if (std::isnan(diff[m]) || std::isnan(diff[m + 1])) continue;
          if (std::isinf(diff[m]) || std::isinf(diff[m + 1])) continue;
          if ((diff[m] > 0) != (diff[m + 1] > 0) || diff[m + 1] == 0.0) {
            const double f = diff[m] / (diff[m] - diff[m + 1]);
            tc = t[m] + f * (t[m + 1] - t[m]);
            width = 0.5 * (t[m + 1] - t[m]) * std::min(1.0, std::abs(diff[m] + diff[m + 1]) /
                                                               std::max(1e-300, std::abs(diff[m] - diff[m + 1])));
            break;
          }
        }
        out.push_back({tc, EventKind::Manifold, "+-", width});
      }
    }
    last = k;
  }
}

int kind_rank(EventKind k) { return static_cast<int>(k); }

void sort_events(std::vector<DQPTEvent>& ev) {
  std::stable_sort(ev.begin(), ev.end(), [](const DQPTEvent& a, const DQPTEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
    return a.manifold < b.manifold;
  });
}

void intervals_for(const std::vector<double>& t, const std::vector<std::vector<double>>& lambda,
                   const std::string& label, const DetectOptions& o, std::vector<DegeneracyInterval>& out) {
  if (!has_second_branch(lambda)) return;
  const auto d = gap_of(lambda);
  const auto kinks = find_kinks(t, lambda[0], o);
  for (const Run& r : closed_runs(d, o.eps_deg)) {
    if (t[r.b] - t[r.a] < o.min_duration) continue;
    std::vector<double> cuts{t[r.a]};
    for (const auto& kk : kinks)
      if (kk.time > t[r.a] && kk.time < t[r.b]) cuts.push_back(kk.time);
    cuts.push_back(t[r.b]);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
      if (cuts[c + 1] - cuts[c] >= o.min_duration) out.push_back({cuts[c], cuts[c + 1], label});
  }
}

}  // namespace

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Branch: return "Branch";
    case EventKind::Manifold: return "Manifold";
    case EventKind::DegeneracyStart: return "DegeneracyStart";
    case EventKind::DegeneracyEnd: return "DegeneracyEnd";
  }
  return "?";
}

EventKind parse_event_kind(const std::string& text) {
  for (EventKind k : {EventKind::Branch, EventKind::Manifold, EventKind::DegeneracyStart, EventKind::DegeneracyEnd})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown event kind '" + text + "'");
}

void DetectOptions::validate() const {
  if (!(eps_deg > 0.0)) throw std::invalid_argument("eps_deg must be > 0");
  if (!(min_duration > 0.0)) throw std::invalid_argument("min_duration must be > 0");
  if (!(crossing_tol >= 0.0)) throw std::invalid_argument("crossing_tol must be >= 0");
  if (!(kink_min_jump > 0.0) || !(kink_contrast >= 1.0))
    throw std::invalid_argument("kink thresholds must be positive (contrast >= 1)");
}

std::vector<double> kink_times(const std::vector<double>& t, const std::vector<double>& y, const DetectOptions& options) {
  options.validate();
  if (t.size() != y.size()) throw std::invalid_argument("kink_times needs equally long arrays");
  std::vector<double> out;
  for (const auto& k : find_kinks(t, y, options)) out.push_back(k.time);
  return out;
}

std::vector<DQPTEvent> detect_crossings(const ReturnRateSeries& series, const DetectOptions& options) {
  options.validate();
  std::vector<DQPTEvent> ev;
  branch_events(series.times, series.lambda_plus, "+", options, ev);
  if (series.has_minus()) branch_events(series.times, series.lambda_minus, "-", options, ev);
  manifold_events(series, options, ev);
  sort_events(ev);
  return ev;
}

std::vector<DegeneracyInterval> detect_extended_degeneracy(const ReturnRateSeries& series,
                                                           const DetectOptions& options) {
  options.validate();
  std::vector<DegeneracyInterval> out;
  intervals_for(series.times, series.lambda_plus, "+", options, out);
  if (series.has_minus()) intervals_for(series.times, series.lambda_minus, "-", options, out);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.manifold < b.manifold;
  });
  return out;
}

std::vector<DQPTEvent> detect_events(const ReturnRateSeries& series, const DetectOptions& options) {
  auto ev = detect_crossings(series, options);
  const auto intervals = detect_extended_degeneracy(series, options);
  // ordering inside a degeneracy interval is noise, not a crossing
  std::erase_if(ev, [&](const DQPTEvent& e) {
    if (e.kind != EventKind::Branch) return false;
    return std::any_of(intervals.begin(), intervals.end(), [&](const DegeneracyInterval& iv) {
      return iv.manifold == e.manifold && e.time > iv.start && e.time < iv.end;
    });
  });
  for (const auto& iv : intervals) {
    ev.push_back({iv.start, EventKind::DegeneracyStart, iv.manifold, 0.0});
    ev.push_back({iv.end, EventKind::DegeneracyEnd, iv.manifold, 0.0});
  }
  sort_events(ev);
  return ev;
}

SpacingStatistics spacing_statistics(const std::vector<DQPTEvent>& events, std::optional<EventKind> kind_filter) {
  std::vector<double> times;
  for (const auto& e : events)
    if (!kind_filter || e.kind == *kind_filter) times.push_back(e.time);
  std::sort(times.begin(), times.end());
  SpacingStatistics st;
  if (times.size() < 2) return st;
  for (std::size_t i = 1; i < times.size(); ++i) st.spacings.push_back(times[i] - times[i - 1]);
  double mean = 0.0;
  for (double s : st.spacings) mean += s;
  mean /= static_cast<double>(st.spacings.size());
  double var = 0.0;
  for (double s : st.spacings) var += (s - mean) * (s - mean);
  var /= static_cast<double>(st.spacings.size());
  st.mean = mean;
  st.regularity = mean > 0.0 ? std::sqrt(var) / mean : std::numeric_limits<double>::infinity();
  return st;
}

std::vector<double> total_rate(const ReturnRateSeries& series) {
  if (!series.has_minus() || series.lambda_minus.empty())
    throw std::invalid_argument("total rate needs both initial manifold states");
  std::vector<double> out(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double a = series.lambda_plus[0][k], b = series.lambda_minus[0][k];
    out[k] = std::isnan(a) ? b : std::isnan(b) ? a : std::min(a, b);
  }
  return out;
}

std::string events_to_json(const std::vector<DQPTEvent>& events, const ReturnRateSeries& series,
                           const DetectOptions& options) {
  json doc;
  doc["schema_version"] = 1;
  doc["manifold_plus"] = series.plus_label;
  doc["manifold_minus"] = series.has_minus() ? json(series.minus_label) : json(nullptr);
  doc["time_unit"] = "1/J";
  doc["options"] = {{"eps_deg", options.eps_deg},
                    {"min_duration", options.min_duration},
                    {"crossing_tol", options.crossing_tol},
                    {"kink_min_jump", options.kink_min_jump},
                    {"kink_contrast", options.kink_contrast}};
  if (series.horizon) doc["horizon"] = *series.horizon;
  json list = json::array();
  json counts = {{"Branch", 0}, {"Manifold", 0}, {"DegeneracyStart", 0}, {"DegeneracyEnd", 0}};
  for (const auto& e : events) {
    list.push_back({{"time", e.time}, {"kind", to_string(e.kind)}, {"manifold", e.manifold}, {"confidence", e.confidence}});
    counts[to_string(e.kind)] = counts[to_string(e.kind)].get<int>() + 1;
  }
  doc["counts"] = counts;
  doc["events"] = list;
  return doc.dump(2) + "\n";
}

std::vector<DQPTEvent> events_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.value("schema_version", 0) != 1) throw std::runtime_error("unsupported events schema version");
  std::vector<DQPTEvent> out;
  for (const auto& e : doc.at("events"))
    out.push_back({e.at("time").get<double>(), parse_event_kind(e.at("kind").get<std::string>()),
                   e.at("manifold").get<std::string>(), e.at("confidence").get<double>()});
  return out;
}

}  // namespace lgt
