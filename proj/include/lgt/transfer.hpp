#pragma once

// Mixed transfer matrices between two uniform MPS and the return-rate
// branches derived from their spectra.

#include <string>
#include <vector>

#include "lgt/eigensolver.hpp"
#include "lgt/umps.hpp"

namespace lgt {

struct TransferSpectrum {
  std::vector<cplx> eps;  // per unit cell, |eps_1| >= |eps_2| >= ...
  std::string manifold;   // "+" or "-"
  bool converged = true;
  double residual = 0.0;
};

/// Leading n_eigs eigenvalues of X -> sum_s K^s X (Bra^s)^dag over one unit
/// cell, i.e. of the transfer matrix of <bra|ket> per cell.
TransferSpectrum transfer_spectrum(const UniformMPS& bra, const UniformMPS& ket, int n_eigs,
                                   const EigsOptions& options = {});

/// <psi_ref(-t/2)|psi(t/2)> per unit cell. `state_ref_minus_half` is the
/// time-reversed (conjugated) evolved reference state.
cplx doubling_overlap(const UniformMPS& state_plus_half, const UniformMPS& state_ref_minus_half,
                      const EigsOptions& options = {});

/// lambda_n = -ln|eps_n|^2 per matter site (two per cell); +infinity when
/// |eps_n| < 1e-15.
double rate_per_site(cplx eps);
std::vector<double> rates(const TransferSpectrum& spectrum);

}  // namespace lgt
