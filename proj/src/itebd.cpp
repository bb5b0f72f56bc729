#include "lgt/itebd.hpp"

#include <cmath>
#include <stdexcept>

namespace lgt {

void TruncationSpec::validate() const {
  if (chi_max < 1) throw std::invalid_argument("chi_max must be >= 1");
  if (!(discarded_weight >= 0.0 && discarded_weight < 1.0))
    throw std::invalid_argument("discarded_weight must lie in [0, 1)");
  // below ~1e-15 the SVD returns noise that poisons the Hastings update
  if (!(relative_cutoff >= 1e-15 && relative_cutoff < 1.0))
    throw std::invalid_argument("relative_cutoff must lie in [1e-15, 1)");
  if (!(recanonicalize_above > 0.0)) throw std::invalid_argument("recanonicalize_above must be > 0");
}

GateReport apply_bond_gate(UniformMPS& psi, int i, const Eigen::MatrixXcd& gate, const TruncationSpec& trunc) {
  const int d = psi.d, n = (i + 1) % 2;
  const int cl = psi.chi(i), cr = psi.chi(i);  // two-site cell: the bond right of site n is bond i again
  std::vector<Eigen::MatrixXcd> pair(d * d);
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) pair[s * d + t] = psi.B[i][s] * psi.B[n][t];

  Eigen::MatrixXcd theta_tilde = Eigen::MatrixXcd::Zero(d * cl, d * cr);
  for (int p = 0; p < d * d; ++p)
    for (int q = 0; q < d * d; ++q) {
      const cplx g = gate(p, q);
      if (g == cplx(0.0)) continue;
      theta_tilde.block((p / d) * cl, (p % d) * cr, cl, cr) += g * pair[q];
    }
  Eigen::MatrixXcd theta = theta_tilde;
  for (int s = 0; s < d; ++s) theta.middleRows(s * cl, cl) = psi.lambda[i].asDiagonal() * theta.middleRows(s * cl, cl);

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double total = sv.squaredNorm();
  GateReport report;
  // smallest k whose tail weight is within the threshold
  int k = static_cast<int>(sv.size());
  double tail = 0.0;
  while (k > 1) {
    const double w = sv(k - 1) * sv(k - 1);
    if (sv(k - 1) > trunc.relative_cutoff * sv(0) && tail + w > trunc.discarded_weight * total) break;
    tail += w;
    --k;
  }
  if (k > trunc.chi_max) {
    report.saturated = true;
    for (int j = trunc.chi_max; j < k; ++j) tail += sv(j) * sv(j);
    k = trunc.chi_max;
  }
  report.discarded = tail / total;

  const Eigen::MatrixXcd V = svd.matrixV().leftCols(k);
  const double kept = std::sqrt(sv.head(k).squaredNorm());
  const Eigen::MatrixXcd left = theta_tilde * V / kept;
  for (int s = 0; s < d; ++s) {
    psi.B[i][s] = left.middleRows(s * cl, cl);
    psi.B[n][s] = V.middleRows(s * cr, cr).adjoint();
  }
  psi.lambda[n] = sv.head(k) / kept;
  psi.truncated_weight += report.discarded;
  return report;
}

ItebdStepper::ItebdStepper(const BondHamiltonian& h, double dt) : dt_(dt) {
  if (dt < 0.0) throw std::invalid_argument("time step must be >= 0");
  const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double w0 = 1.0 - 2.0 * w1;
  // S2(tau) = A(tau/2) B(tau) A(tau/2); S4(dt) = S2(w1 dt) S2(w0 dt) S2(w1 dt)
  const double a[] = {w1 / 2, (w1 + w0) / 2, (w0 + w1) / 2, w1 / 2};
  const double b[] = {w1, w0, w1};
  for (int k = 0; k < 4; ++k) {
    layers_.emplace_back(0, bond_gate(h.bond[0], a[k] * dt));
    if (k < 3) layers_.emplace_back(1, bond_gate(h.bond[1], b[k] * dt));
  }
}

GateReport ItebdStepper::step(UniformMPS& psi, const TruncationSpec& trunc) const {
  GateReport total;
  if (dt_ == 0.0) return total;
  for (const auto& [bond, gate] : layers_) {
    const GateReport r = apply_bond_gate(psi, bond, gate, trunc);
    total.discarded += r.discarded;
    total.saturated = total.saturated || r.saturated;
  }
  psi.time += dt_;
  return total;
}

GateReport evolve_umps(UniformMPS& psi, const BondHamiltonian& h, double duration, double dt_max,
                       const TruncationSpec& trunc) {
  if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be > 0");
  trunc.validate();
  GateReport total;
  if (duration <= 0.0) return total;
  const int n = static_cast<int>(std::ceil(duration / dt_max - 1e-9));
  const ItebdStepper stepper(h, duration / n);
  const double t0 = psi.time;
  for (int k = 0; k < n; ++k) {
    const GateReport r = stepper.step(psi, trunc);
    total.discarded += r.discarded;
    total.saturated = total.saturated || r.saturated;
    // truncation and rounding slowly spoil the right-canonical form the
    // Hastings update relies on
    if (canonical_residuals(psi).right > trunc.recanonicalize_above) canonicalize(psi, trunc.relative_cutoff);
  }
  psi.time = t0 + duration;
  return total;
}

}  // namespace lgt
