#include "lgt/freefermion.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace lgt {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be > 0");
  if (max_subdivisions < 1) throw std::invalid_argument("quadrature needs max_subdivisions >= 1");
}

double nd_analytic(double t) {
  if (t < 0.0) throw std::invalid_argument("nd_analytic needs t >= 0");
  return std::cyl_bessel_j(0.0, 2.0 * t);
}

double return_rate_analytic(double t, const QuadratureSpec& quad) {
  quad.validate();
  if (t < 0.0) throw std::invalid_argument("return_rate_analytic needs t >= 0");
  if (t == 0.0) return 0.0;
  constexpr double pi = std::numbers::pi;

  // log singularities sit where t cos k = (n + 1/2) pi; split there
  std::vector<double> cuts{0.0};
  std::vector<bool> is_root{false};
  for (int n = static_cast<int>(std::floor(t / pi - 0.5)); n >= 0; --n) {
    const double r = std::acos(std::min(1.0, (n + 0.5) * pi / t));
    if (r > cuts.back()) {
      cuts.push_back(r);
      is_root.push_back(true);
    } else {
      is_root.back() = true;  // root at k = 0
    }
  }
  if (cuts.back() < pi / 2) {
    cuts.push_back(pi / 2);
    is_root.push_back(false);
  }

  // tanh-sinh clusters nodes at the panel ends, where the log singularities are
  boost::math::quadrature::tanh_sinh<double> integrator(static_cast<std::size_t>(quad.max_subdivisions));
  double sum = 0.0;
  double err_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    // xc is the signed distance to the nearest end (a - k or b - k). Near a
    // root k_r, |cos(t cos k)| = |sin(t (cos k - cos k_r))|, and the product
    // form of the difference keeps full relative precision.
    auto f = [&, a, b, i](double k, double xc) {
      const bool left = xc < 0.0;
      double c;
      if ((left && is_root[i]) || (!left && is_root[i + 1])) {
        const double kr = left ? a : b;
        c = std::abs(std::sin(2.0 * t * std::sin(0.5 * (k + kr)) * std::sin(-0.5 * xc)));
      } else {
        c = std::abs(std::cos(t * std::cos(k)));
      }
      return c > 0.0 ? std::log(c) : 0.0;  // measure-zero point
    };
    double err = 0.0;
    sum += integrator.integrate(f, a, b, 0.1 * quad.rel_tol, &err);
    err_total += err;
  }
  const double value = -2.0 / pi * sum;
  const double err_abs = 2.0 / pi * err_total;
  if (err_abs > std::max(quad.abs_tol, quad.rel_tol * std::abs(value)))
  {
    char msg[128];
    std::snprintf(msg, sizeof msg, "return-rate quadrature did not converge at t=%.6g (error estimate %.3e)", t,
                  err_abs);
    throw QuadratureError(msg, err_abs);
  }
  return std::max(value, 0.0);
}

double return_rate_mode_sum(double t, int L) {
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("mode sum needs even L >= 2");
  double s = 0.0;
  for (int m = 1; m <= L / 2; ++m) {
    const double k = (m - 0.5) * std::numbers::pi / L;
    const double c = std::abs(std::cos(t * std::cos(k)));
    if (c < 1e-300) return std::numeric_limits<double>::infinity();
    s += std::log(c);
  }
  return -2.0 / L * s;
}

double dqpt_times_analytic(int n) {
  if (n < 0) throw std::invalid_argument("cusp index must be >= 0");
  return (n + 0.5) * std::numbers::pi;
}

}  // namespace lgt
