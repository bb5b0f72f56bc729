#pragma once

// Quench drivers: evolve a named product state and record the return-rate
// branches to the initial manifold together with the order parameters.
//
// Three backends produce the same ReturnRateSeries:
//   * run_quench_umps   - infinite chain, iTEBD + mixed transfer matrices;
//   * run_quench_exact  - finite chain, Krylov propagation (one branch);
//   * free_fermion_series - the analytic mu = h = 0 oracle.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lgt/eigensolver.hpp"
#include "lgt/exact.hpp"
#include "lgt/itebd.hpp"
#include "lgt/model.hpp"

namespace lgt {

/// Per-sample flag bits.
enum SampleFlag : std::uint32_t {
  kFlagInfinite = 1u,       // some reported rate is +infinity
  kFlagSaturated = 2u,      // chi_max forced extra truncation
  kFlagNotConverged = 4u,   // transfer eigensolver missed its tolerance
  kFlagMissingBranch = 8u,  // transfer matrix smaller than the requested branch count
};

struct ReturnRateSeries {
  std::vector<double> times;  // 1/J
  int n_branches = 2;
  std::string plus_label;   // initial state
  std::string minus_label;  // degenerate partner; empty when there is none
  // lambda[n][k]: branch n at time k, per matter site. minus is empty without a partner.
  std::vector<std::vector<double>> lambda_plus, lambda_minus;
  std::vector<std::vector<cplx>> eps_plus, eps_minus;  // per unit cell (UMPS only)
  std::vector<double> ex, ex_stag, n_d, trunc_err;
  std::vector<std::uint32_t> flags;
  /// Set when the backend stopped early; samples end at this time.
  std::optional<double> horizon;
  std::string horizon_reason;

  std::size_t size() const { return times.size(); }
  bool has_minus() const { return !minus_label.empty(); }
  /// Appends one empty sample at time t (all values NaN, flags 0).
  void push_sample(double t);
};

/// Degenerate partner with flipped links (fp+ <-> fp-, sl+ <-> sl-, vac+ <-> vac-); CP has none.
std::optional<std::string> partner_state(const std::string& name);

/// Sign making N_d(0) = +1 for the named initial state.
int nd_sign_for(const std::string& name);

/// Output grid 0, dt_output, ..., t_max (the last point snapped to t_max when
/// within 1e-9 of it).
std::vector<double> output_grid(double t_max, double dt_output);

struct UmpsControls {
  double dt = 0.02;  // largest integrator step, 1/J
  /// Rate track and observable track. Local observables drift by ~1e-2 at
  /// t ~ 3 with a 1e-7 weight cut, so both default to 1e-10.
  TruncationSpec rate_trunc{128, 1e-10};
  TruncationSpec obs_trunc{128, 1e-10};
  int n_eigs = 2;  // branches per manifold, 2..4
  bool doubling = true;
  bool observables = true;
  EigsOptions eigs;

  void validate() const;
};

/// Infinite-chain quench. With doubling, the rate at time t comes from the
/// half-time states psi(t/2) of the initial state and of its partner, which
/// evolve concurrently. Failures stop the series and set the horizon.
ReturnRateSeries run_quench_umps(const std::string& initial, const ModelParams& params, double t_max,
                                 double dt_output, const UmpsControls& controls = {});

struct ExactControls {
  int n_matter = 12;
  Boundary boundary = Boundary::Periodic;
  EvolutionSpec evolution;
  bool doubling = false;  // rates from psi(t/2) pairs instead of direct overlaps

  void validate() const;
};

/// Finite-chain quench in the sector of the initial state; one branch per
/// manifold (a finite chain has no transfer-matrix spectrum).
ReturnRateSeries run_quench_exact(const std::string& initial, const ModelParams& params, double t_max,
                                  double dt_output, const ExactControls& controls = {});

/// Analytic mu = h = 0 series: lambda_1 from the integral formula, N_d = J_0(2t).
ReturnRateSeries free_fermion_series(double t_max, double dt_output);

}  // namespace lgt
