#pragma once

// Closed-form results for the mu = h = 0 quench from a staggered product
// state (the gauge fields drop out and the matter is a free XX chain).

#include <stdexcept>

namespace lgt {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 15;  // refinement levels per panel

  void validate() const;
};

/// Thrown when the adaptive quadrature misses its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double error_estimate() const { return estimate_; }

 private:
  double estimate_;
};

/// Staggered density imbalance N_d(t) = J_0(2t).
double nd_analytic(double t);

/// lambda(t) = -(2/pi) int_0^{pi/2} ln|cos(t cos k)| dk, per matter site.
double return_rate_analytic(double t, const QuadratureSpec& quad = {});

/// Midpoint Riemann sum with L/2 momenta k_m = (m - 1/2) pi / L. Returns
/// +infinity when one of the modes is singular.
double return_rate_mode_sum(double t, int L);

/// Time of the n-th cusp, (n + 1/2) pi.
double dqpt_times_analytic(int n);

}  // namespace lgt
