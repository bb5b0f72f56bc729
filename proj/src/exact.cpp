#include "lgt/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgt/krylov.hpp"

namespace lgt {

void EvolutionSpec::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("evolution dt must be > 0");
  if (krylov_dim < 4) throw std::invalid_argument("krylov_dim must be >= 4");
  if (!(tol > 0.0)) throw std::invalid_argument("evolution tol must be > 0");
}

StateVector product_state(std::shared_ptr<const Basis> basis, const ProductStateConfig& config) {
  const auto idx = basis->index_of(basis->encode(config));
  if (!idx) throw std::invalid_argument("configuration is not in the basis (wrong gauge sector?)");
  StateVector s{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size())), std::move(basis)};
  s.amplitudes(static_cast<Eigen::Index>(*idx)) = 1.0;
  return s;
}

std::vector<StateVector> evolve(const OperatorMatrix& H, const StateVector& psi0,
                                const std::vector<double>& t_grid, const EvolutionSpec& spec) {
  spec.validate();
  if (H.rows() != psi0.amplitudes.size()) throw std::invalid_argument("H and psi0 dimensions differ");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("psi0 must be normalized");
  std::vector<StateVector> out;
  out.reserve(t_grid.size());
  Eigen::VectorXcd v = psi0.amplitudes;
  double t = 0.0;
  double step = spec.dt;
  for (double target : t_grid) {
    if (target < t - 1e-14) throw std::invalid_argument("time grid must be ascending and >= 0");
    while (target - t > 1e-14) {
      const double h = std::min(step, target - t);
      Eigen::VectorXcd trial = v;
      const KrylovStepInfo info = lanczos_propagate(H, trial, h, spec.krylov_dim);
      if (info.error_estimate > spec.tol) {
        step = h / 2;
        if (step < 1e-8) throw EvolutionError("Krylov step size underflow", t);
        continue;
      }
      v = trial / trial.norm();
      t += h;
      if (step < spec.dt) step = std::min(spec.dt, 2 * step);
    }
    t = target;
    out.push_back({v, psi0.basis});
  }
  return out;
}

cplx overlap(const StateVector& a, const StateVector& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) throw std::invalid_argument("states live on different bases");
  return a.amplitudes.dot(b.amplitudes);
}

StateVector time_reversed(const StateVector& psi) { return {psi.amplitudes.conjugate(), psi.basis}; }

double rate_from_overlap(cplx amplitude, int L) {
  const double a = std::abs(amplitude);
  if (a < 1e-15) return std::numeric_limits<double>::infinity();
  return -2.0 * std::log(a) / L;
}

double loschmidt_rate(const StateVector& ref, const StateVector& psi, int L) {
  return rate_from_overlap(overlap(ref, psi), L);
}

cplx doubling_overlap(const StateVector& state_plus_half, const StateVector& state_ref_minus_half) {
  return overlap(state_ref_minus_half, state_plus_half);
}

namespace {

std::vector<double> probabilities(const StateVector& psi) {
  std::vector<double> p(psi.amplitudes.size());
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) p[i] = std::norm(psi.amplitudes(i));
  return p;
}

}  // namespace

std::vector<double> site_densities(const StateVector& psi) {
  const Basis& b = *psi.basis;
  const auto p = probabilities(psi);
  std::vector<double> n(b.n_matter(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (int j = 1; j <= b.n_matter(); ++j) n[j - 1] += p[i] * b.occupation(b.key(i), j);
  return n;
}

std::vector<double> link_values(const StateVector& psi) {
  const Basis& b = *psi.basis;
  const auto p = probabilities(psi);
  std::vector<double> v(b.n_links(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (int j = 1; j <= b.n_links(); ++j) v[j - 1] += p[i] * b.link(b.key(i), j);
  return v;
}

ObservableSample measure_observables(const StateVector& psi, const ObservableRequest& which) {
  const Basis& b = *psi.basis;
  const int L = b.n_matter();
  ObservableSample s;
  if ((which.ex || which.ex_stag) && b.n_links() > 0) {
    const auto v = link_values(psi);
    double sum = 0.0, stag = 0.0;
    for (int j = 1; j <= b.n_links(); ++j) {
      sum += v[j - 1];
      stag += stagger(j) * v[j - 1];
    }
    if (which.ex) s.ex = sum / b.n_links();
    if (which.ex_stag) s.ex_stag = stag / b.n_links();
  }
  if (which.n_d) {
    const auto n = site_densities(psi);
    double d = 0.0;
    for (int j = 1; j <= L; ++j) d -= stagger(j) * n[j - 1];
    s.n_d = which.nd_sign * 2.0 * d / L;
  }
  if (which.gauge_violation && b.kind() != ModelKind::FreeFermion) {
    const GaugeSectorSpec sector = which.sector.value_or(reference_sector(b.lattice(), b.kind()));
    const auto p = probabilities(psi);
    double worst = 0.0;
    for (int j = 1; j <= L; ++j) {
      double g = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i)
        g += p[i] * gauss_value(b, b.key(i), j, sector.left_virtual, sector.right_virtual);
      worst = std::max(worst, std::abs(g - sector.g[j - 1]));
    }
    s.gauge_violation = worst;
  }
  return s;
}

double resonance_charge(const StateVector& psi) {
  const Basis& b = *psi.basis;
  if (b.kind() == ModelKind::FreeFermion) throw std::invalid_argument("no link fields in a free-fermion basis");
  const auto n = site_densities(psi);
  const auto v = link_values(psi);
  double c = 0.0;
  for (int j = 1; j <= b.n_matter(); ++j) c += stagger(j) * n[j - 1];
  for (int j = 1; j <= b.n_links(); ++j) {
    const double v_qlm = (b.kind() == ModelKind::Z2LGT) ? stagger(j) * v[j - 1] : v[j - 1];
    c -= stagger(j) * v_qlm;
  }
  return c;
}

double constant_of_motion_check(const std::vector<StateVector>& trajectory) {
  if (trajectory.empty()) return 0.0;
  const double c0 = resonance_charge(trajectory.front());
  const int L = trajectory.front().basis->n_matter();
  double drift = 0.0;
  for (const auto& psi : trajectory) drift = std::max(drift, std::abs(resonance_charge(psi) - c0));
  return drift / L;
}

}  // namespace lgt
