#pragma once

#include <Eigen/Dense>

#include "lgt/operators.hpp"

namespace lgt {

struct KrylovStepInfo {
  double error_estimate = 0.0;  // a-posteriori bound on ||exp(-iH dt)v - result||
  int dimension = 0;            // Krylov dimension actually used
  bool invariant_subspace = false;
};

/// Replaces v by exp(-i H dt) v using a Lanczos basis of at most m vectors
/// (fully reorthogonalized). H must be Hermitian.
KrylovStepInfo lanczos_propagate(const OperatorMatrix& H, Eigen::VectorXcd& v, double dt, int m);

}  // namespace lgt
