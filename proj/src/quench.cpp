#include "lgt/quench.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "lgt/bond_hamiltonian.hpp"
#include "lgt/freefermion.hpp"
#include "lgt/transfer.hpp"

namespace lgt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_initial(const std::string& initial, const ModelParams& params) {
  params.validate();
  const ModelKind implied = kind_of_name(initial);
  if (params.kind == ModelKind::U1QLM && implied != ModelKind::U1QLM)
    throw std::invalid_argument("initial state '" + initial + "' is not a quantum-link state");
  if (params.kind != ModelKind::U1QLM && implied == ModelKind::U1QLM)
    throw std::invalid_argument("initial state '" + initial + "' needs the U1QLM model");
}

void check_times(double t_max, double dt_output) {
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be > 0");
  if (!(dt_output > 0.0)) throw std::invalid_argument("dt_output must be > 0");
}

ProductStateConfig config_for(const std::string& name, const LatticeSpec& lattice, ModelKind kind) {
  const auto c = named_state(name, lattice);
  return kind == ModelKind::FreeFermion ? matter_only(c) : c;
}

// Partner states coincide with the initial state once the links are dropped.
std::optional<std::string> partner_for(const std::string& name, ModelKind kind) {
  if (kind == ModelKind::FreeFermion) return std::nullopt;
  return partner_state(name);
}

ReturnRateSeries empty_series(const std::string& initial, std::optional<std::string> partner, int branches) {
  ReturnRateSeries s;
  s.n_branches = branches;
  s.plus_label = initial;
  s.minus_label = partner.value_or("");
  s.lambda_plus.assign(branches, {});
  s.eps_plus.assign(branches, {});
  if (partner) {
    s.lambda_minus.assign(branches, {});
    s.eps_minus.assign(branches, {});
  }
  return s;
}

void store_spectrum(const TransferSpectrum& spec, int branches, std::vector<std::vector<double>>& lambda,
                    std::vector<std::vector<cplx>>& eps, std::uint32_t& flags) {
  if (!spec.converged) flags |= kFlagNotConverged;
  for (int n = 0; n < branches; ++n) {
    if (n < static_cast<int>(spec.eps.size())) {
      eps[n].back() = spec.eps[n];
      lambda[n].back() = rate_per_site(spec.eps[n]);
    } else {
      // the transfer matrix has fewer eigenvalues: the branch is absent (eps = 0)
      eps[n].back() = 0.0;
      lambda[n].back() = kInf;
      flags |= kFlagMissingBranch;
    }
    if (std::isinf(lambda[n].back())) flags |= kFlagInfinite;
  }
}

void measure_umps(const UniformMPS& psi, int nd_sign, ReturnRateSeries& s) {
  const Eigen::VectorXd nd = occupation_diagonal(psi.kind);
  const double n0 = site_expectation(psi, 0, nd), n1 = site_expectation(psi, 1, nd);
  s.n_d.back() = nd_sign * (n0 - n1);
  if (psi.kind != ModelKind::FreeFermion) {
    const Eigen::VectorXd vd = link_diagonal(psi.kind);
    // grouped site 0 carries the odd link, site 1 the even one
    const double v0 = site_expectation(psi, 0, vd), v1 = site_expectation(psi, 1, vd);
    s.ex.back() = 0.5 * (v0 + v1);
    s.ex_stag.back() = 0.5 * (v1 - v0);
  }
}

}  // namespace

void ReturnRateSeries::push_sample(double t) {
  times.push_back(t);
  for (auto& b : lambda_plus) b.push_back(kNaN);
  for (auto& b : lambda_minus) b.push_back(kNaN);
  for (auto& b : eps_plus) b.push_back(cplx(kNaN, kNaN));
  for (auto& b : eps_minus) b.push_back(cplx(kNaN, kNaN));
  ex.push_back(kNaN);
  ex_stag.push_back(kNaN);
  n_d.push_back(kNaN);
  trunc_err.push_back(kNaN);
  flags.push_back(0u);
}

std::optional<std::string> partner_state(const std::string& name) {
  kind_of_name(name);
  if (name == "fp+") return "fp-";
  if (name == "fp-") return "fp+";
  if (name == "sl+") return "sl-";
  if (name == "sl-") return "sl+";
  if (name == "vac+") return "vac-";
  if (name == "vac-") return "vac+";
  return std::nullopt;
}

int nd_sign_for(const std::string& name) { return odd_sites_occupied(name) ? +1 : -1; }

std::vector<double> output_grid(double t_max, double dt_output) {
  check_times(t_max, dt_output);
  const auto n = static_cast<long>(std::floor(t_max / dt_output + 1e-9));
  std::vector<double> grid;
  grid.reserve(n + 2);
  for (long k = 0; k <= n; ++k) grid.push_back(k * dt_output);
  if (t_max - grid.back() > 1e-9) grid.push_back(t_max);
  else grid.back() = std::min(grid.back(), t_max);
  return grid;
}

void UmpsControls::validate() const {
  if (!(dt > 0.0) || dt > 0.05) throw std::invalid_argument("controls.dt must lie in (0, 0.05]");
  rate_trunc.validate();
  obs_trunc.validate();
  if (n_eigs < 2 || n_eigs > 4) throw std::invalid_argument("controls.n_eigs must be 2, 3 or 4");
}

ReturnRateSeries run_quench_umps(const std::string& initial, const ModelParams& params, double t_max,
                                 double dt_output, const UmpsControls& controls) {
  check_initial(initial, params);
  controls.validate();
  const std::vector<double> grid = output_grid(t_max, dt_output);
  const LatticeSpec cell{2, Boundary::Infinite};
  const ModelKind kind = params.kind;
  const auto partner = partner_for(initial, kind);
  const int branches = controls.n_eigs;
  ReturnRateSeries s = empty_series(initial, partner, branches);
  const BondHamiltonian bh = build_bond_hamiltonian(params);
  const int nd_sign = nd_sign_for(initial);

  const UniformMPS plus0 = product_to_umps(config_for(initial, cell, kind), kind);
  std::optional<UniformMPS> minus0;
  if (partner) minus0 = product_to_umps(config_for(*partner, cell, kind), kind);

  // Rate track: plus (and partner) states at t/2 with doubling, or plus at t.
  UniformMPS plus = plus0;
  std::optional<UniformMPS> minus = controls.doubling ? minus0 : std::nullopt;
  // Observable track at looser truncation; with direct rates the rate track doubles as it.
  const bool separate_obs = controls.observables && controls.doubling;
  UniformMPS obs = plus0;

  EigsOptions eigs = controls.eigs;
  eigs.n_eigs = branches;
  bool saturated = false;
  double t_prev = 0.0;

  for (double t : grid) {
    try {
      const double dt_out = t - t_prev;
      if (dt_out > 0.0) {
        const double rate_step = controls.doubling ? 0.5 * dt_out : dt_out;
        std::vector<std::future<GateReport>> jobs;
        jobs.push_back(std::async(std::launch::async, [&] {
          return evolve_umps(plus, bh, rate_step, controls.dt, controls.rate_trunc);
        }));
        if (minus)
          jobs.push_back(std::async(std::launch::async, [&] {
            return evolve_umps(*minus, bh, rate_step, controls.dt, controls.rate_trunc);
          }));
        if (separate_obs)
          jobs.push_back(std::async(std::launch::async, [&] {
            return evolve_umps(obs, bh, dt_out, controls.dt, controls.obs_trunc);
          }));
        // the first two jobs are the rate track; observable saturation is not a rate flag
        for (std::size_t j = 0; j < jobs.size(); ++j) {
          const GateReport r = jobs[j].get();
          if (j < (minus ? 2u : 1u)) saturated = saturated || r.saturated;
        }
        canonicalize(plus, controls.rate_trunc.relative_cutoff);
        if (minus) canonicalize(*minus, controls.rate_trunc.relative_cutoff);
      }

      s.push_sample(t);
      if (saturated) s.flags.back() |= kFlagSaturated;
      TransferSpectrum sp_plus, sp_minus;
      if (controls.doubling) {
        auto f_minus = std::async(std::launch::async, [&] {
          return minus ? transfer_spectrum(time_reversed(*minus), plus, branches, eigs) : TransferSpectrum{};
        });
        sp_plus = transfer_spectrum(time_reversed(plus), plus, branches, eigs);
        sp_minus = f_minus.get();
      } else {
        sp_plus = transfer_spectrum(plus0, plus, branches, eigs);
        if (minus0) sp_minus = transfer_spectrum(*minus0, plus, branches, eigs);
      }
      store_spectrum(sp_plus, branches, s.lambda_plus, s.eps_plus, s.flags.back());
      if (partner) store_spectrum(sp_minus, branches, s.lambda_minus, s.eps_minus, s.flags.back());

      s.trunc_err.back() = std::max(plus.truncated_weight, minus ? minus->truncated_weight : 0.0);
      if (controls.observables) measure_umps(separate_obs ? obs : plus, nd_sign, s);
      t_prev = t;
    } catch (const std::exception& e) {
      // keep the samples that completed and mark where the series stops
      if (!s.times.empty() && s.times.back() == t) {
        // drop a half-written sample
        s.times.pop_back();
        for (auto& b : s.lambda_plus) b.pop_back();
        for (auto& b : s.lambda_minus) b.pop_back();
        for (auto& b : s.eps_plus) b.pop_back();
        for (auto& b : s.eps_minus) b.pop_back();
        s.ex.pop_back();
        s.ex_stag.pop_back();
        s.n_d.pop_back();
        s.trunc_err.pop_back();
        s.flags.pop_back();
      }
      s.horizon = t_prev;
      s.horizon_reason = e.what();
      break;
    }
  }
  return s;
}

void ExactControls::validate() const {
  LatticeSpec{n_matter, boundary}.validate();
  if (boundary == Boundary::Infinite) throw std::invalid_argument("exact backend needs a finite chain");
  if (n_matter > 16) throw std::invalid_argument("exact backend is limited to L <= 16 matter sites");
  evolution.validate();
}

ReturnRateSeries run_quench_exact(const std::string& initial, const ModelParams& params, double t_max,
                                  double dt_output, const ExactControls& controls) {
  check_initial(initial, params);
  controls.validate();
  const std::vector<double> grid = output_grid(t_max, dt_output);
  const ModelKind kind = params.kind;
  const LatticeSpec lattice{controls.n_matter, controls.boundary};
  const auto partner = partner_for(initial, kind);
  ReturnRateSeries s = empty_series(initial, partner, 1);
  s.eps_plus.clear();
  s.eps_minus.clear();

  const ProductStateConfig c0 = config_for(initial, lattice, kind);
  std::shared_ptr<const Basis> basis;
  std::optional<GaugeSectorSpec> sector;
  if (kind == ModelKind::FreeFermion) {
    basis = std::make_shared<Basis>(full_basis(lattice, kind, c0.particle_number()));
  } else {
    sector = sector_of(c0, lattice, kind);
    basis = std::make_shared<Basis>(gauge_sector_basis(lattice, *sector, kind, c0.particle_number()));
  }
  const OperatorMatrix H = build_hamiltonian(params, *basis);
  const StateVector psi0 = product_state(basis, c0);
  std::optional<StateVector> ref_minus;
  if (partner) ref_minus = product_state(basis, config_for(*partner, lattice, kind));

  ObservableRequest req;
  req.nd_sign = nd_sign_for(initial);
  req.gauge_violation = false;
  req.sector = sector;
  const int L = controls.n_matter;

  std::vector<StateVector> traj, half_plus, half_minus;
  try {
    traj = evolve(H, psi0, grid, controls.evolution);
    if (controls.doubling) {
      std::vector<double> half(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) half[k] = 0.5 * grid[k];
      auto f = std::async(std::launch::async, [&] {
        return ref_minus ? evolve(H, *ref_minus, half, controls.evolution) : std::vector<StateVector>{};
      });
      half_plus = evolve(H, psi0, half, controls.evolution);
      half_minus = f.get();
    }
  } catch (const EvolutionError& e) {
    s.horizon = e.reached();
    s.horizon_reason = e.what();
    // keep only the samples that were reached by every trajectory
    std::size_t keep = 0;
    while (keep < grid.size() && grid[keep] <= e.reached()) ++keep;
    keep = std::min(keep, traj.size());
    if (controls.doubling) keep = std::min({keep, half_plus.size(), ref_minus ? half_minus.size() : keep});
    traj.resize(keep);
    half_plus.resize(std::min(half_plus.size(), keep));
    half_minus.resize(std::min(half_minus.size(), keep));
  }

  for (std::size_t k = 0; k < traj.size(); ++k) {
    s.push_sample(grid[k]);
    cplx a_plus, a_minus;
    if (controls.doubling) {
      a_plus = doubling_overlap(half_plus[k], time_reversed(half_plus[k]));
      if (ref_minus) a_minus = doubling_overlap(half_plus[k], time_reversed(half_minus[k]));
    } else {
      a_plus = overlap(psi0, traj[k]);
      if (ref_minus) a_minus = overlap(*ref_minus, traj[k]);
    }
    s.lambda_plus[0].back() = rate_from_overlap(a_plus, L);
    if (ref_minus) s.lambda_minus[0].back() = rate_from_overlap(a_minus, L);
    if (std::isinf(s.lambda_plus[0].back()) || (ref_minus && std::isinf(s.lambda_minus[0].back())))
      s.flags.back() |= kFlagInfinite;
    const ObservableSample o = measure_observables(traj[k], req);
    if (o.ex) s.ex.back() = *o.ex;
    if (o.ex_stag) s.ex_stag.back() = *o.ex_stag;
    if (o.n_d) s.n_d.back() = *o.n_d;
    s.trunc_err.back() = 0.0;
  }
  return s;
}

ReturnRateSeries free_fermion_series(double t_max, double dt_output) {
  const std::vector<double> grid = output_grid(t_max, dt_output);
  ReturnRateSeries s = empty_series("fp+", std::nullopt, 1);
  s.eps_plus.clear();
  for (double t : grid) {
    s.push_sample(t);
    s.lambda_plus[0].back() = return_rate_analytic(t);
    s.n_d.back() = nd_analytic(t);
    s.trunc_err.back() = 0.0;
  }
  return s;
}

}  // namespace lgt
