#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "lgt/freefermion.hpp"

using namespace lgt;

namespace {

// J_0 from its power series, summed in long double
double j0_series(double x) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = -(static_cast<long double>(x) * x) / 4.0L;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-22L) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("N_d is J_0(2t)") {
  CHECK(nd_analytic(0.0) == 1.0);
  for (double t = 0.0; t <= 6.0; t += 0.05) {
    CHECK(std::abs(nd_analytic(t) - j0_series(2 * t)) < 1e-11);
    CHECK(std::abs(nd_analytic(t)) <= 1.0);
  }
  // first zero by bisection on the series
  double a = 1.0, b = 1.5;
  for (int i = 0; i < 80; ++i) {
    const double m = 0.5 * (a + b);
    (j0_series(2 * a) * j0_series(2 * m) <= 0 ? b : a) = m;
  }
  CHECK(a == doctest::Approx(1.20241).epsilon(1e-5));
  CHECK(std::abs(nd_analytic(a)) < 1e-12);
  CHECK_THROWS(nd_analytic(-1.0));
}

TEST_CASE("return rate integral") {
  CHECK(return_rate_analytic(0.0) == 0.0);
  for (double t = 0.05; t < 8.0; t += 0.173) CHECK(return_rate_analytic(t) >= 0.0);
  // slope jump across the first cusp
  const double tc = std::numbers::pi / 2, e = 1e-3;
  const double left = (return_rate_analytic(tc) - return_rate_analytic(tc - e)) / e;
  const double right = (return_rate_analytic(tc + e) - return_rate_analytic(tc)) / e;
  CHECK(left - right > 1.0);
  // Richardson-extrapolated midpoint sums
  const double s1 = return_rate_mode_sum(1.0, 2000), s2 = return_rate_mode_sum(1.0, 4000);
  CHECK(return_rate_analytic(1.0) == doctest::Approx((4 * s2 - s1) / 3).epsilon(1e-9));
}

TEST_CASE("mode sum converges to the integral") {
  for (int L : {2, 8, 100}) CHECK(return_rate_mode_sum(0.0, L) == 0.0);
  for (double t : {0.5, 1.0, 2.0}) CHECK(std::abs(return_rate_mode_sum(t, 4096) - return_rate_analytic(t)) < 1e-3);
  // before the first cusp the integrand is smooth and periodic, so the
  // midpoint sum converges spectrally (down to round-off)
  for (double t : {0.3, 0.9, 1.2}) {
    const double exact = return_rate_analytic(t);
    double prev = std::abs(return_rate_mode_sum(t, 8) - exact);
    for (int L = 16; L <= 2048; L *= 2) {
      const double err = std::abs(return_rate_mode_sum(t, L) - exact);
      CHECK((err < prev || err < 1e-13));
      prev = err;
    }
  }
  // past it a log singularity sits between grid points and the pointwise
  // error oscillates with L; the mean error over a time window still
  // decreases with every doubling
  for (double lo : {2.0, 4.0}) {
    std::vector<double> ts, exact;
    for (int i = 0; i <= 40; ++i) {
      ts.push_back(lo + i / 40.0);
      exact.push_back(return_rate_analytic(ts.back()));
    }
    auto mean_err = [&](int L) {
      double s = 0;
      for (std::size_t i = 0; i < ts.size(); ++i) s += std::abs(return_rate_mode_sum(ts[i], L) - exact[i]);
      return s / ts.size();
    };
    double prev = mean_err(64);
    for (int L = 128; L <= 4096; L *= 2) {
      const double e = mean_err(L);
      CHECK(e < prev);
      prev = e;
    }
  }
  CHECK_THROWS(return_rate_mode_sum(1.0, 3));
}

TEST_CASE("cusps are square-root singular from the left") {
  for (int n : {0, 1}) {
    const double tn = dqpt_times_analytic(n);
    const double at = return_rate_analytic(tn);
    // least-squares slope of log(delta lambda) against log(eps)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (double le = -4.0; le <= -2.0 + 1e-9; le += 0.25) {
      const double eps = std::pow(10.0, le);
      const double x = std::log(eps), y = std::log(at - return_rate_analytic(tn - eps));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
      ++count;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("analytic cusp times") {
  CHECK(dqpt_times_analytic(0) == doctest::Approx(std::numbers::pi / 2));
  CHECK(dqpt_times_analytic(1) == doctest::Approx(3 * std::numbers::pi / 2));
  for (int n = 0; n < 10; ++n)
    CHECK(dqpt_times_analytic(n + 1) - dqpt_times_analytic(n) == doctest::Approx(std::numbers::pi));
}
