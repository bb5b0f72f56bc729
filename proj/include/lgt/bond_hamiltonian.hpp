#pragma once

// Local operators of the infinite chain in the grouped-site picture used by
// the MPS engine. A grouped site holds one matter site and the link to its
// right, so the four-site unit cell (matter, link, matter, link) becomes two
// grouped sites and H becomes a sum of nearest-neighbour bond terms.
//
// Local index: s = 2 n + l with l = 0 for link sign +1, l = 1 for -1. The
// free-fermion model has no links and uses s = n.

#include <array>

#include <Eigen/Dense>

#include "lgt/model.hpp"

namespace lgt {

int local_dim(ModelKind kind);
int local_index(ModelKind kind, int occupation, int link);

struct BondHamiltonian {
  ModelKind kind = ModelKind::Z2LGT;
  int d = 4;
  /// bond[i] couples grouped site i of the cell to the next grouped site; it
  /// carries the hop across link i and all single-site terms of site i.
  std::array<Eigen::MatrixXd, 2> bond;
};

BondHamiltonian build_bond_hamiltonian(const ModelParams& params);

/// Diagonal single-site operators of grouped site i (i = 0: odd matter site).
Eigen::VectorXd occupation_diagonal(ModelKind kind);
Eigen::VectorXd link_diagonal(ModelKind kind);

/// exp(-i h tau) of a real symmetric bond term, as a d^2 x d^2 gate.
Eigen::MatrixXcd bond_gate(const Eigen::MatrixXd& h, double tau);

}  // namespace lgt
