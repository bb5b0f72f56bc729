#pragma once

#include <complex>
#include <functional>

#include <Eigen/Sparse>

#include "lgt/basis.hpp"

namespace lgt {

using cplx = std::complex<double>;
using OperatorMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Hamiltonian of the requested kind on the given basis. Throws when the
/// basis kind differs from params.kind or the basis is not closed under H.
OperatorMatrix build_hamiltonian(const ModelParams& params, const Basis& basis);

/// Only the diagonal part H_mu + H_h (Z2) or the bias (U1QLM).
OperatorMatrix build_diagonal_energy(const ModelParams& params, const Basis& basis);

/// Z2 Gauss operator on matter site j (1-based). Open chains use virtual
/// boundary links with the given signs.
OperatorMatrix gauss_operator_z2(int j, const Basis& basis, int left_virtual = +1,
                                 int right_virtual = +1);
/// U(1) Gauss operator on matter site j (1-based).
OperatorMatrix gauss_operator_u1(int j, const Basis& basis, int left_virtual = +1,
                                 int right_virtual = +1);

/// Diagonal operator with entries f(key).
OperatorMatrix diagonal_operator(const Basis& basis,
                                 const std::function<double(std::uint64_t)>& entry);

OperatorMatrix particle_number_operator(const Basis& basis);

/// Gauss eigenvalue of a single basis key, used for diagonal measurements.
int gauss_value(const Basis& basis, std::uint64_t key, int j, int left_virtual = +1,
                int right_virtual = +1);

/// max_ij |A_ij| of a sparse matrix.
double max_abs_entry(const OperatorMatrix& m);

}  // namespace lgt
