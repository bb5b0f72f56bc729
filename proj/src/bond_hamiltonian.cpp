#include "lgt/bond_hamiltonian.hpp"

#include <stdexcept>

namespace lgt {

int local_dim(ModelKind kind) { return kind == ModelKind::FreeFermion ? 2 : 4; }

int local_index(ModelKind kind, int occupation, int link) {
  if (kind == ModelKind::FreeFermion) return occupation;
  return 2 * occupation + (link < 0 ? 1 : 0);
}

namespace {

int occ_of(ModelKind kind, int s) { return kind == ModelKind::FreeFermion ? s : s / 2; }
int link_of(ModelKind kind, int s) { return kind == ModelKind::FreeFermion ? 1 : (s % 2 ? -1 : 1); }

}  // namespace

Eigen::VectorXd occupation_diagonal(ModelKind kind) {
  const int d = local_dim(kind);
  Eigen::VectorXd v(d);
  for (int s = 0; s < d; ++s) v(s) = occ_of(kind, s);
  return v;
}

Eigen::VectorXd link_diagonal(ModelKind kind) {
  const int d = local_dim(kind);
  Eigen::VectorXd v(d);
  for (int s = 0; s < d; ++s) v(s) = link_of(kind, s);
  return v;
}

BondHamiltonian build_bond_hamiltonian(const ModelParams& p) {
  p.validate();
  BondHamiltonian bh;
  bh.kind = p.kind;
  bh.d = local_dim(p.kind);
  const int d = bh.d;
  for (int i = 0; i < 2; ++i) {
    const int j = i + 1;  // matter site index inside the cell; link j is its right link
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const int row = a * d + b;
        const int na = occ_of(p.kind, a), nb = occ_of(p.kind, b), v = link_of(p.kind, a);
        double diag = 0.0;
        if (p.kind == ModelKind::Z2LGT) diag = p.mu * stagger(j) * na - p.h * v;
        if (p.kind == ModelKind::U1QLM && j % 2 == 0) diag = p.delta * 0.5 * v;
        h(row, row) += diag;
        if (na == nb) continue;
        // hop across link j; a U(1) link only admits the move that steps s^z toward its other value
        if (p.kind == ModelKind::U1QLM && v != (na ? +1 : -1)) continue;
        int a2 = a, b2 = b;
        if (p.kind == ModelKind::FreeFermion) {
          a2 = 1 - na;
          b2 = 1 - nb;
        } else {
          a2 = local_index(p.kind, 1 - na, -v);
          b2 = local_index(p.kind, 1 - nb, link_of(p.kind, b));
        }
        h(a2 * d + b2, row) += -0.5 * p.J;
      }
    }
    bh.bond[i] = h;
  }
  return bh;
}

Eigen::MatrixXcd bond_gate(const Eigen::MatrixXd& h, double tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("bond Hamiltonian diagonalization failed");
  Eigen::VectorXcd phase(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) phase(k) = std::exp(std::complex<double>(0.0, -tau * es.eigenvalues()(k)));
  const Eigen::MatrixXcd U = es.eigenvectors().cast<std::complex<double>>();
  return U * phase.asDiagonal() * U.adjoint();
}

}  // namespace lgt
