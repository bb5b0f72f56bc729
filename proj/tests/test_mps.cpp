#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lgt/bond_hamiltonian.hpp"
#include "lgt/eigensolver.hpp"
#include "lgt/exact.hpp"
#include "lgt/freefermion.hpp"
#include "lgt/itebd.hpp"
#include "lgt/transfer.hpp"
#include "lgt/umps.hpp"

using namespace lgt;

namespace {

const LatticeSpec kCell{2, Boundary::Infinite};

UniformMPS named_umps(const char* name, ModelKind kind = ModelKind::Z2LGT) {
  auto c = named_state(name, kCell);
  if (kind == ModelKind::FreeFermion) c = matter_only(c);
  return product_to_umps(c, kind);
}

UniformMPS random_product(int d, std::mt19937& rng) {
  std::normal_distribution<double> g;
  UniformMPS psi;
  psi.kind = d == 2 ? ModelKind::FreeFermion : ModelKind::Z2LGT;
  psi.d = d;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXcd v(d);
    for (int s = 0; s < d; ++s) v(s) = cplx(g(rng), g(rng));
    v.normalize();
    psi.B[i].assign(d, Eigen::MatrixXcd(1, 1));
    for (int s = 0; s < d; ++s) psi.B[i][s](0, 0) = v(s);
    psi.lambda[i] = Eigen::VectorXd::Ones(1);
  }
  return psi;
}

double nd_umps(const UniformMPS& psi) {
  const auto n = occupation_diagonal(psi.kind);
  return site_expectation(psi, 0, n) - site_expectation(psi, 1, n);
}

}  // namespace

TEST_CASE("Krylov-Schur agrees with dense diagonalization") {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  const int n = 400;
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = cplx(g(rng), g(rng)) / std::sqrt(double(n));
  // plant a few well-separated outliers
  M(0, 0) += 3.0;
  M(1, 1) += cplx(0.0, 2.5);
  M(2, 2) += -2.2;
  const EigsResult dense = eigs_dense(M, 4);
  EigsOptions opt;
  opt.n_eigs = 4;
  const EigsResult it = eigs_largest([&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y = M * x; }, n, opt);
  CHECK(it.converged);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(it.values[k] - dense.values[k]) < 1e-8);
  // leading vector is an eigenvector
  CHECK((M * it.leading_vector - it.values[0] * it.leading_vector).norm() < 1e-8);
  // the zero map converges immediately
  const EigsResult zero = eigs_largest([](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y = 0.0 * x; }, 500, opt);
  CHECK(std::abs(zero.values[0]) == 0.0);
}

TEST_CASE("product states as uniform MPS") {
  const auto fp = named_umps("fp+");
  CHECK(fp.max_chi() == 1);
  CHECK(canonical_residuals(fp).right == 0.0);
  CHECK(std::abs(transfer_spectrum(fp, fp, 1).eps[0] - 1.0) < 1e-15);
  CHECK(std::abs(transfer_spectrum(named_umps("fp-"), fp, 1).eps[0]) == 0.0);
  CHECK(std::isinf(rate_per_site(transfer_spectrum(named_umps("fp-"), fp, 1).eps[0])));
  CHECK_THROWS(product_to_umps(ProductStateConfig{{1, 0, 0, 1}, {1, 1, 1, 1}, {}}, ModelKind::Z2LGT));
  // chi = 1 spectrum is the product of the local overlaps
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_product(4, rng), b = random_product(4, rng);
    cplx expected = 1.0;
    for (int i = 0; i < 2; ++i) {
      cplx o = 0.0;
      for (int s = 0; s < 4; ++s) o += std::conj(a.B[i][s](0, 0)) * b.B[i][s](0, 0);
      expected *= o;
    }
    CHECK(std::abs(transfer_spectrum(a, b, 1).eps[0] - expected) < 1e-14);
  }
}

TEST_CASE("bond Hamiltonian energy on product states is the classical energy") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 10; ++k) {
    const ModelParams z2{ModelKind::Z2LGT, 1.0, u(rng), u(rng), 0.0};
    const ModelParams u1{ModelKind::U1QLM, 1.0, 0.0, 0.0, u(rng)};
    for (const auto& p : {z2, u1}) {
      const auto bh = build_bond_hamiltonian(p);
      for (const auto& name : named_state_labels()) {
        if (kind_of_name(name) != p.kind) continue;
        const auto cfg = named_state(name, kCell);
        const auto psi = product_to_umps(cfg, p.kind);
        const double e = (bond_expectation(psi, 0, bh.bond[0]) + bond_expectation(psi, 1, bh.bond[1])).real();
        CHECK(e == doctest::Approx(classical_energy(cfg, p)).epsilon(1e-14));
      }
      CHECK((bh.bond[0] - bh.bond[0].transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("iTEBD: identity step, canonical form, snapshot round trip") {
  const auto bh = build_bond_hamiltonian({ModelKind::Z2LGT, 1.0, 0.4, 0.6, 0.0});
  auto psi = named_umps("sl+");
  const auto before = psi;
  ItebdStepper(bh, 0.0).step(psi, {});
  CHECK((psi.B[0][2] - before.B[0][2]).norm() == 0.0);

  evolve_umps(psi, bh, 1.0, 0.05, {64, 1e-10});
  canonicalize(psi);
  const auto res = canonical_residuals(psi);
  CHECK(res.right < 1e-10);
  CHECK(res.left < 1e-10);
  CHECK(std::abs(transfer_spectrum(psi, psi, 1).eps[0] - 1.0) < 1e-10);

  std::stringstream buf;
  write_snapshot(buf, psi, "{\"note\":1}");
  std::string meta;
  const auto back = read_snapshot(buf, &meta);
  CHECK(meta == "{\"note\":1}");
  CHECK(back.time == psi.time);
  for (int i = 0; i < 2; ++i) {
    CHECK((back.lambda[i] - psi.lambda[i]).norm() == 0.0);
    for (int s = 0; s < 4; ++s) CHECK((back.B[i][s] - psi.B[i][s]).norm() == 0.0);
  }
  std::stringstream bad("not a snapshot");
  CHECK_THROWS(read_snapshot(bad));
}

TEST_CASE("iTEBD densities match exact diagonalization inside the light cone") {
  const ModelParams p{ModelKind::Z2LGT, 1.0, 0.5, 0.3, 0.0};
  const LatticeSpec ring{16, Boundary::Periodic};
  auto basis = std::make_shared<Basis>(gauge_sector_basis(ring, reference_sector(ring, ModelKind::Z2LGT), ModelKind::Z2LGT, 8));
  const OperatorMatrix H = build_hamiltonian(p, *basis);
  std::vector<double> grid;
  for (int k = 0; k <= 5; ++k) grid.push_back(0.5 * k);
  const auto traj = evolve(H, product_state(basis, named_state("fp+", ring)), grid);

  const auto bh = build_bond_hamiltonian(p);
  auto psi = named_umps("fp+");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0) evolve_umps(psi, bh, 0.5, 0.025, {128, 1e-10});
    const auto n = site_densities(traj[k]);
    const auto v = link_values(traj[k]);
    const auto nd = occupation_diagonal(ModelKind::Z2LGT), vd = link_diagonal(ModelKind::Z2LGT);
    CHECK(std::abs(site_expectation(psi, 0, nd) - n[8]) < 1e-3);
    CHECK(std::abs(site_expectation(psi, 1, nd) - n[9]) < 1e-3);
    CHECK(std::abs(site_expectation(psi, 0, vd) - v[8]) < 1e-3);
    CHECK(std::abs(site_expectation(psi, 1, vd) - v[9]) < 1e-3);
  }
}

TEST_CASE("free-fermion point: energy conservation and Bessel imbalance") {
  const auto bh = build_bond_hamiltonian({ModelKind::FreeFermion});
  auto psi = named_umps("fp+", ModelKind::FreeFermion);
  auto energy = [&](const UniformMPS& s) {
    return (bond_expectation(s, 0, bh.bond[0]) + bond_expectation(s, 1, bh.bond[1])).real();
  };
  const double e0 = energy(psi);
  double drift = 0.0;
  for (int k = 1; k <= 10; ++k) {
    evolve_umps(psi, bh, 0.5, 0.05, {64, 1e-8});
    drift = std::max(drift, std::abs(energy(psi) - e0));
    CHECK(std::abs(nd_umps(psi) - nd_analytic(0.5 * k)) < 1e-3);
  }
  CHECK(drift < 1e-6);
}

TEST_CASE("doubling overlap equals the direct overlap") {
  // overlaps react to truncation at first order in the dropped amplitude, so
  // the identity is checked without weight truncation
  const TruncationSpec exact{128, 0.0};
  const auto bh = build_bond_hamiltonian({ModelKind::Z2LGT, 1.0, 0.0, 0.5, 0.0});
  const auto sl = named_umps("sl+");
  auto full = sl, half = sl;
  evolve_umps(full, bh, 1.2, 0.02, exact);
  evolve_umps(half, bh, 0.6, 0.02, exact);
  canonicalize(full);
  canonicalize(half);
  for (const char* bra : {"sl+", "sl-"}) {
    auto ref_half = named_umps(bra);
    evolve_umps(ref_half, bh, 0.6, 0.02, exact);
    canonicalize(ref_half);
    const cplx direct = transfer_spectrum(named_umps(bra), full, 1).eps[0];
    const cplx doubled = doubling_overlap(half, time_reversed(ref_half));
    CHECK(std::abs(rate_per_site(direct) - rate_per_site(doubled)) < 1e-8);
  }
}
