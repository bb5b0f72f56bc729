#pragma once

// Largest-magnitude eigenvalues of a (non-Hermitian) linear map given only
// through its action. Krylov-Schur restarts; dense fallback for small maps.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace lgt {

using LinearMap = std::function<void(const Eigen::VectorXcd& in, Eigen::VectorXcd& out)>;

struct EigsOptions {
  int n_eigs = 4;
  int krylov_dim = 0;     // 0: automatic
  double tol = 1e-10;     // relative to the largest Ritz value
  int max_restarts = 300;
  std::uint64_t seed = 20240611;
  int dense_below = 64;  // maps this small are diagonalized densely
  Eigen::VectorXcd start;  // optional starting vector (else seeded random)
};

struct EigsResult {
  std::vector<std::complex<double>> values;  // |values[0]| >= |values[1]| >= ...
  Eigen::VectorXcd leading_vector;           // eigenvector of values[0]
  bool converged = false;
  int restarts = 0;
  double residual = 0.0;  // largest relative residual of the returned block
};

/// Sorts eigenvalues by decreasing magnitude, ties (to 1e-12 relative)
/// broken by increasing phase in (-pi, pi].
void sort_by_magnitude(std::vector<std::complex<double>>& values);

EigsResult eigs_largest(const LinearMap& op, Eigen::Index dim, const EigsOptions& options = {});

/// Dense variant used as fallback and as a test oracle.
EigsResult eigs_dense(const Eigen::MatrixXcd& m, int n_eigs);

}  // namespace lgt
