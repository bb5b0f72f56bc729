#pragma once

// Finite-chain reference propagator on enumerated bases.

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lgt/basis.hpp"
#include "lgt/operators.hpp"

namespace lgt {

struct StateVector {
  Eigen::VectorXcd amplitudes;
  std::shared_ptr<const Basis> basis;

  double norm() const { return amplitudes.norm(); }
};

struct EvolutionSpec {
  double dt = 0.02;     // largest substep, 1/J
  int krylov_dim = 20;
  double tol = 1e-10;   // per-substep error target

  void validate() const;
};

class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, double reached)
      : std::runtime_error(what), reached_(reached) {}
  /// Last time reached successfully.
  double reached() const { return reached_; }

 private:
  double reached_;
};

/// Product state |config> on the basis; throws if config is not a basis state.
StateVector product_state(std::shared_ptr<const Basis> basis, const ProductStateConfig& config);

/// psi(t) = exp(-iHt) psi0 at every time of the ascending, non-negative grid.
std::vector<StateVector> evolve(const OperatorMatrix& H, const StateVector& psi0,
                                const std::vector<double>& t_grid, const EvolutionSpec& spec = {});

/// <a|b>.
cplx overlap(const StateVector& a, const StateVector& b);

/// Complex conjugate of the amplitudes; equals psi(-t) for real H and a real
/// initial state.
StateVector time_reversed(const StateVector& psi);

/// -(1/L) ln |<ref|psi>|^2; +infinity when |<ref|psi>| < 1e-15.
double loschmidt_rate(const StateVector& ref, const StateVector& psi, int L);
/// Same conversion from a bare overlap.
double rate_from_overlap(cplx amplitude, int L);

/// <psi_ref(-t/2)|psi(t/2)>, i.e. the direct overlap <ref|exp(-iHt)|psi0>
/// computed from two half-time trajectories.
cplx doubling_overlap(const StateVector& state_plus_half, const StateVector& state_ref_minus_half);

struct ObservableRequest {
  bool ex = true;
  bool ex_stag = true;
  bool n_d = true;
  bool gauge_violation = true;
  /// Overall sign of N_d, chosen so that N_d(0) = +1 for the initial state.
  int nd_sign = +1;
  /// Sector used for the gauge violation (defaults to the reference sector).
  std::optional<GaugeSectorSpec> sector;
};

struct ObservableSample {
  std::optional<double> ex;               // sum_j <tau^x_j> / n_links
  std::optional<double> ex_stag;          // sum_j (-1)^j <tau^x_j> / n_links
  std::optional<double> n_d;              // (2/L) sum_j (-1)^{j+1} <n_j>, times nd_sign
  std::optional<double> gauge_violation;  // max_j |<G_j> - g_j|
};

ObservableSample measure_observables(const StateVector& psi, const ObservableRequest& which = {});

/// <n_j> for every matter site.
std::vector<double> site_densities(const StateVector& psi);
/// <v_j> (tau^x for Z2, 2 s^z for the QLM) for every link.
std::vector<double> link_values(const StateVector& psi);

/// Dimensionless charge C = sum_j (-1)^j n_j - sum_j (-1)^j v^QLM_j, with the
/// QLM-frame link v^QLM_j = (-1)^j tau^x_j for Z2 states. It is conserved by
/// the QLM Hamiltonian, and mu C = H_mu + H_h for the Z2 model at mu = h.
double resonance_charge(const StateVector& psi);

/// max_t |<C>(t) - <C>(0)| / L along a trajectory.
double constant_of_motion_check(const std::vector<StateVector>& trajectory);

}  // namespace lgt
