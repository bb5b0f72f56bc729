#pragma once

// Translation-invariant MPS with a two-grouped-site unit cell (four physical
// sites: matter, link, matter, link), kept in the Vidal/Hastings form:
// right-canonical tensors B[i] and Schmidt values lambda[i] on the bond to
// the left of grouped site i.

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgt/model.hpp"

namespace lgt {

using cplx = std::complex<double>;

/// One grouped-site tensor: d matrices of shape chi_left x chi_right.
using SiteTensor = std::vector<Eigen::MatrixXcd>;

struct UniformMPS {
  ModelKind kind = ModelKind::Z2LGT;
  int d = 4;
  std::array<SiteTensor, 2> B;
  std::array<Eigen::VectorXd, 2> lambda;
  double time = 0.0;
  double truncated_weight = 0.0;  // accumulated discarded weight

  int chi(int bond) const { return static_cast<int>(lambda[bond].size()); }
  int max_chi() const { return std::max(chi(0), chi(1)); }
};

/// chi = 1 state of a unit-cell periodic configuration (2 matter sites per
/// cell; longer periodic configurations are accepted if they repeat).
UniformMPS product_to_umps(const ProductStateConfig& config, ModelKind kind);

struct CanonicalResiduals {
  double right = 0.0;  // max |sum_s B B^dag - 1|
  double left = 0.0;   // max |sum_s B^dag L^2 B - L'^2|
};
CanonicalResiduals canonical_residuals(const UniformMPS& psi);

/// Restores the canonical form from the fixed points of the cell transfer
/// matrix; Schmidt values below `cutoff` are dropped.
void canonicalize(UniformMPS& psi, double cutoff = 1e-13);

/// Complex-conjugated tensors (psi(-t) for real H and real initial states).
UniformMPS time_reversed(const UniformMPS& psi);

/// Cell tensor of grouped sites 0 and 1: d^2 matrices, index s0 * d + s1.
SiteTensor cell_tensor(const UniformMPS& psi);

/// <O> of a diagonal single-site operator on grouped site i.
double site_expectation(const UniformMPS& psi, int i, const Eigen::VectorXd& diagonal);
/// <h> of a d^2 x d^2 bond operator on (i, i+1).
cplx bond_expectation(const UniformMPS& psi, int i, const Eigen::MatrixXd& h);

/// Binary snapshot: magic "LGTUMPS1", u32 version, kind, d, per bond the
/// Schmidt values, per site the tensor shapes and complex data, time,
/// truncated weight and a free-form metadata string.
void write_snapshot(std::ostream& out, const UniformMPS& psi, const std::string& metadata = "");
UniformMPS read_snapshot(std::istream& in, std::string* metadata = nullptr);

}  // namespace lgt
