#include "lgt/series.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lgt {

namespace {

std::vector<std::string> column_names(int branches) {
  std::vector<std::string> cols{"t", "lambda1_plus", "lambda2_plus", "lambda1_minus", "lambda2_minus"};
  if (branches > 2) {
    for (int n = 3; n <= branches; ++n) cols.push_back("lambda" + std::to_string(n) + "_plus");
    for (int n = 3; n <= branches; ++n) cols.push_back("lambda" + std::to_string(n) + "_minus");
  }
  for (const char* c : {"ex_flux", "ex_flux_stag", "n_diff", "trunc_err", "flags"}) cols.emplace_back(c);
  return cols;
}

double branch_value(const std::vector<std::vector<double>>& lambda, int n, std::size_t k) {
  if (n >= static_cast<int>(lambda.size())) return std::numeric_limits<double>::quiet_NaN();
  return lambda[n][k];
}

double parse_number(const std::string& text, int line) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw std::runtime_error("series line " + std::to_string(line) + ": bad number '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", value);
  return buf;
}

void write_series_csv(std::ostream& out, const ReturnRateSeries& s, const SeriesMetadata& extra) {
  out << "# lgtq return-rate series\n"
      << "# units: t in 1/J; lambda*: return rate per matter site, -ln|eps|^2 / 2 per two-site cell"
         " (finite chains: -(1/L) ln|overlap|^2)\n"
      << "# units: ex_flux, ex_flux_stag: mean link field per link; n_diff: odd-even occupation"
         " difference per matter-site pair, N_d(0) = +1; trunc_err: accumulated discarded weight\n"
      << "# flags: 1 infinite rate, 2 chi_max saturated, 4 eigensolver not converged, 8 missing branch\n"
      << "# manifold_plus: " << s.plus_label << "\n"
      << "# manifold_minus: " << (s.has_minus() ? s.minus_label : "none") << "\n"
      << "# n_branches: " << s.n_branches << "\n";
  if (s.horizon) out << "# horizon: " << format_number(*s.horizon) << "\n# horizon_reason: " << s.horizon_reason << "\n";
  for (const auto& [k, v] : extra) out << "# " << k << ": " << v << "\n";

  const int width = std::max(2, s.n_branches);
  const auto cols = column_names(width);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::string row = format_number(s.times[k]);
    auto add = [&](double v) { row += ","; row += format_number(v); };
    add(branch_value(s.lambda_plus, 0, k));
    add(branch_value(s.lambda_plus, 1, k));
    add(branch_value(s.lambda_minus, 0, k));
    add(branch_value(s.lambda_minus, 1, k));
    for (int n = 2; n < width; ++n) add(branch_value(s.lambda_plus, n, k));
    for (int n = 2; n < width; ++n) add(branch_value(s.lambda_minus, n, k));
    add(s.ex[k]);
    add(s.ex_stag[k]);
    add(s.n_d[k]);
    add(s.trunc_err[k]);
    row += "," + std::to_string(s.flags[k]);
    out << row << "\n";
  }
}

void write_series_csv(const std::string& path, const ReturnRateSeries& series, const SeriesMetadata& extra) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_series_csv(f, series, extra);
  if (!f) throw std::runtime_error("write failed for " + path);
}

ReturnRateSeries read_series_csv(std::istream& in, SeriesMetadata* metadata) {
  ReturnRateSeries s;
  SeriesMetadata meta;
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos && colon > 2) {
        std::string key = line.substr(2, colon - 2);
        std::string value = line.substr(colon + 1);
        if (!value.empty() && value[0] == ' ') value.erase(0, 1);
        if (key == "units" || key == "flags") continue;
        if (key == "manifold_plus") s.plus_label = value;
        else if (key == "manifold_minus") s.minus_label = value == "none" ? "" : value;
        else if (key == "n_branches") s.n_branches = std::stoi(value);
        else if (key == "horizon") s.horizon = parse_number(value, line_no);
        else if (key == "horizon_reason") s.horizon_reason = value;
        else meta[key] = value;
      }
      continue;
    }
    if (header.empty()) {
      header = split(line);
      if (header.empty() || header[0] != "t") throw std::runtime_error("series file lacks the header row");
      const auto expected = column_names(static_cast<int>((header.size() - 10) / 2 + 2));
      if (header != expected) throw std::runtime_error("unexpected series columns");
      const int width = static_cast<int>((header.size() - 10) / 2 + 2);
      if (s.n_branches < 1 || s.n_branches > width) throw std::runtime_error("n_branches does not match the columns");
      s.lambda_plus.assign(s.n_branches, {});
      if (s.has_minus()) s.lambda_minus.assign(s.n_branches, {});
      continue;
    }
    const auto f = split(line);
    if (f.size() != header.size())
      throw std::runtime_error("series line " + std::to_string(line_no) + ": wrong number of fields");
    const int width = static_cast<int>((header.size() - 10) / 2 + 2);
    s.push_sample(parse_number(f[0], line_no));
    auto plus_col = [&](int n) { return n < 2 ? 1 + n : 5 + (n - 2); };
    auto minus_col = [&](int n) { return n < 2 ? 3 + n : 5 + (width - 2) + (n - 2); };
    for (int n = 0; n < s.n_branches; ++n) {
      s.lambda_plus[n].back() = parse_number(f[plus_col(n)], line_no);
      if (s.has_minus()) s.lambda_minus[n].back() = parse_number(f[minus_col(n)], line_no);
    }
    const std::size_t base = header.size() - 5;
    s.ex.back() = parse_number(f[base], line_no);
    s.ex_stag.back() = parse_number(f[base + 1], line_no);
    s.n_d.back() = parse_number(f[base + 2], line_no);
    s.trunc_err.back() = parse_number(f[base + 3], line_no);
    s.flags.back() = static_cast<std::uint32_t>(std::stoul(f[base + 4]));
  }
  if (header.empty()) throw std::runtime_error("series file is empty");
  // complex eigenvalues are not persisted
  s.eps_plus.clear();
  s.eps_minus.clear();
  if (metadata) *metadata = std::move(meta);
  return s;
}

ReturnRateSeries read_series_csv(const std::string& path, SeriesMetadata* metadata) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  return read_series_csv(f, metadata);
}

}  // namespace lgt
