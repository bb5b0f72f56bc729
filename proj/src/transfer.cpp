#include "lgt/transfer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lgt {

TransferSpectrum transfer_spectrum(const UniformMPS& bra, const UniformMPS& ket, int n_eigs,
                                   const EigsOptions& options) {
  if (bra.d != ket.d) throw std::invalid_argument("states have different local dimensions");
  if (n_eigs < 1) throw std::invalid_argument("n_eigs must be >= 1");
  const Eigen::Index ck = ket.chi(0), cb = bra.chi(0);
  LinearMap op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    Eigen::Map<const Eigen::MatrixXcd> X(in.data(), ck, cb);
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(ket.chi(1), bra.chi(1));
    for (int s = 0; s < ket.d; ++s) Y.noalias() += ket.B[1][s] * X * bra.B[1][s].adjoint();
    Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(ck, cb);
    for (int s = 0; s < ket.d; ++s) Z.noalias() += ket.B[0][s] * Y * bra.B[0][s].adjoint();
    out = Eigen::Map<Eigen::VectorXcd>(Z.data(), ck * cb);
  };
  EigsOptions opt = options;
  opt.n_eigs = n_eigs;
  const EigsResult res = eigs_largest(op, ck * cb, opt);
  TransferSpectrum spec;
  spec.eps = res.values;
  spec.converged = res.converged;
  spec.residual = res.residual;
  return spec;
}

cplx doubling_overlap(const UniformMPS& state_plus_half, const UniformMPS& state_ref_minus_half,
                      const EigsOptions& options) {
  return transfer_spectrum(state_ref_minus_half, state_plus_half, 1, options).eps.front();
}

double rate_per_site(cplx eps) {
  const double a = std::abs(eps);
  if (a < 1e-15) return std::numeric_limits<double>::infinity();
  return -std::log(a);  // -ln|eps|^2 / 2
}

std::vector<double> rates(const TransferSpectrum& spectrum) {
  std::vector<double> out;
  for (const cplx& e : spectrum.eps) out.push_back(rate_per_site(e));
  return out;
}

}  // namespace lgt
