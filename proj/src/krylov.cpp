#include "lgt/krylov.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lgt {

KrylovStepInfo lanczos_propagate(const OperatorMatrix& H, Eigen::VectorXcd& v, double dt, int m) {
  KrylovStepInfo info;
  const double beta0 = v.norm();
  if (beta0 == 0.0 || dt == 0.0) return info;
  const Eigen::Index n = v.size();
  m = static_cast<int>(std::min<Eigen::Index>(m, n));

  Eigen::MatrixXcd V(n, m);
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[k] couples vectors k and k+1
  V.col(0) = v / beta0;
  double beta_last = 0.0;
  int k = 0;
  for (; k < m; ++k) {
    Eigen::VectorXcd w = H * V.col(k);
    const double a = V.col(k).dot(w).real();
    alpha.push_back(a);
    w -= a * V.col(k);
    if (k > 0) w -= beta[k - 1] * V.col(k - 1);
    // full reorthogonalization, applied twice
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= k; ++i) w -= V.col(i).dot(w) * V.col(i);
    const double b = w.norm();
    if (b < 1e-13 * std::max(1.0, std::abs(a))) {
      info.invariant_subspace = true;
      ++k;
      break;
    }
    if (k + 1 < m) {
      beta.push_back(b);
      V.col(k + 1) = w / b;
    } else {
      beta_last = b;
    }
  }
  const int dim = k;
  info.dimension = dim;

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) T(i, i) = alpha[i];
  for (int i = 0; i + 1 < dim; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  if (es.info() != Eigen::Success) throw std::runtime_error("Lanczos tridiagonal eigensolver failed");
  const Eigen::MatrixXd& Q = es.eigenvectors();
  Eigen::VectorXcd phase(dim);
  for (int i = 0; i < dim; ++i) phase(i) = std::exp(cplx(0.0, -dt * es.eigenvalues()(i)));
  // c = Q exp(-i D dt) Q^T e_1
  const Eigen::VectorXcd c = Q.cast<cplx>() * (phase.asDiagonal() * Q.row(0).transpose().cast<cplx>());
  v = beta0 * (V.leftCols(dim) * c);
  info.error_estimate = info.invariant_subspace ? 0.0 : beta0 * beta_last * std::abs(c(dim - 1));
  return info;
}

}  // namespace lgt
