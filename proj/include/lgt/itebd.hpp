#pragma once

// Real-time evolution of a UniformMPS by infinite TEBD: exact two-site bond
// gates composed into a fourth-order (Yoshida) splitting, Hastings update
// (no division by Schmidt values), truncation by discarded weight and chi_max.

#include <utility>
#include <vector>

#include "lgt/bond_hamiltonian.hpp"
#include "lgt/umps.hpp"

namespace lgt {

struct TruncationSpec {
  int chi_max = 128;
  double discarded_weight = 1e-8;  // per bond update, relative
  double relative_cutoff = 1e-13;  // singular values below this (x s_0) are always dropped
  /// Right-canonical residual above which evolve_umps re-canonicalizes.
  double recanonicalize_above = 1e-6;

  void validate() const;
};

struct GateReport {
  double discarded = 0.0;
  bool saturated = false;  // chi_max forced a larger discarded weight than requested
};

/// Applies a d^2 x d^2 gate to the bond (i, i+1) and restores the Hastings form.
GateReport apply_bond_gate(UniformMPS& psi, int i, const Eigen::MatrixXcd& gate, const TruncationSpec& trunc);

class ItebdStepper {
 public:
  /// Fourth-order step of size dt; dt = 0 gives the identity.
  ItebdStepper(const BondHamiltonian& h, double dt);

  /// One step; returns the accumulated report of all gate layers.
  GateReport step(UniformMPS& psi, const TruncationSpec& trunc) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  std::vector<std::pair<int, Eigen::MatrixXcd>> layers_;
};

/// Evolves by `duration` using equal steps no longer than dt_max.
GateReport evolve_umps(UniformMPS& psi, const BondHamiltonian& h, double duration, double dt_max,
                       const TruncationSpec& trunc);

}  // namespace lgt
