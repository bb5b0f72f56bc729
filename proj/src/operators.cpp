#include "lgt/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgt {

namespace {

using Triplet = Eigen::Triplet<cplx>;

double diagonal_entry(const ModelParams& p, const Basis& basis, std::uint64_t key) {
  double e = 0.0;
  if (p.kind == ModelKind::Z2LGT) {
    for (int j = 1; j <= basis.n_matter(); ++j) e += p.mu * stagger(j) * basis.occupation(key, j);
    for (int j = 1; j <= basis.n_links(); ++j) e -= p.h * basis.link(key, j);
  } else if (p.kind == ModelKind::U1QLM) {
    for (int j = 2; j <= basis.n_links(); j += 2) e += p.delta * 0.5 * basis.link(key, j);
  }
  return e;
}

// Jordan-Wigner string for a hop across bond j: nearest-neighbour bonds carry
// no string; the periodic wrap bond (L, 1) picks up the parity of sites 2..L-1.
int string_sign(const Basis& basis, std::uint64_t key, int j) {
  const int L = basis.n_matter();
  if (j < L) return 1;
  int count = 0;
  for (int k = 2; k <= L - 1; ++k) count += basis.occupation(key, k);
  return basis.lattice().twist * ((count % 2 == 0) ? 1 : -1);
}

OperatorMatrix from_triplets(std::size_t dim, const std::vector<Triplet>& triplets) {
  OperatorMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

OperatorMatrix build_hamiltonian(const ModelParams& params, const Basis& basis) {
  params.validate();
  if (params.kind != basis.kind())
    throw std::invalid_argument("basis kind " + to_string(basis.kind()) + " does not match model " +
                                to_string(params.kind));
  const int L = basis.n_matter();
  const bool periodic = basis.lattice().boundary == Boundary::Periodic;
  const int n_bonds = periodic ? L : L - 1;
  const double t_hop = -0.5 * params.J;
  std::vector<Triplet> triplets;
  triplets.reserve(basis.size() * (1 + n_bonds));
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const std::uint64_t key = basis.key(col);
    const double d = diagonal_entry(params, basis, key);
    if (d != 0.0) triplets.emplace_back(col, col, d);
    for (int j = 1; j <= n_bonds; ++j) {
      const int a = j;
      const int b = (j % L) + 1;
      const int na = basis.occupation(key, a);
      const int nb = basis.occupation(key, b);
      if (na == nb) continue;
      // na = 1: particle moves a -> b (rightward across bond j)
      if (params.kind == ModelKind::U1QLM) {
        // rightward lowers s^z (needs +1), leftward raises it (needs -1)
        const int need = na ? +1 : -1;
        if (basis.link(key, j) != need) continue;
      }
      std::uint64_t target = basis.flip_occupation(basis.flip_occupation(key, a), b);
      if (params.kind != ModelKind::FreeFermion) target = basis.flip_link(target, j);
      const auto row = basis.index_of(target);
      if (!row) throw std::invalid_argument("basis is not closed under the Hamiltonian");
      triplets.emplace_back(*row, col, t_hop * string_sign(basis, key, j));
    }
  }
  return from_triplets(basis.size(), triplets);
}

OperatorMatrix build_diagonal_energy(const ModelParams& params, const Basis& basis) {
  return diagonal_operator(basis, [&](std::uint64_t key) { return diagonal_entry(params, basis, key); });
}

int gauss_value(const Basis& basis, std::uint64_t key, int j, int left_virtual, int right_virtual) {
  const int L = basis.n_matter();
  if (j < 1 || j > L) throw std::out_of_range("Gauss operator site out of range");
  if (basis.kind() == ModelKind::FreeFermion)
    throw std::invalid_argument("free-fermion basis has no Gauss law");
  const bool periodic = basis.lattice().boundary == Boundary::Periodic;
  auto link = [&](int k) {
    if (periodic) return basis.link(key, ((k - 1) % L + L) % L + 1);
    if (k <= 0) return left_virtual;
    if (k >= L) return right_virtual;
    return basis.link(key, k);
  };
  const int n = basis.occupation(key, j);
  if (basis.kind() == ModelKind::Z2LGT) return (n ? -1 : 1) * link(j - 1) * link(j);
  const int background = (j % 2 == 0) ? 1 : 0;
  return n - background - (link(j) - link(j - 1)) / 2;
}

OperatorMatrix gauss_operator_z2(int j, const Basis& basis, int left_virtual, int right_virtual) {
  if (basis.kind() != ModelKind::Z2LGT) throw std::invalid_argument("Z2 Gauss operator needs a Z2 basis");
  return diagonal_operator(basis, [&](std::uint64_t key) {
    return static_cast<double>(gauss_value(basis, key, j, left_virtual, right_virtual));
  });
}

OperatorMatrix gauss_operator_u1(int j, const Basis& basis, int left_virtual, int right_virtual) {
  if (basis.kind() != ModelKind::U1QLM) throw std::invalid_argument("U(1) Gauss operator needs a QLM basis");
  return diagonal_operator(basis, [&](std::uint64_t key) {
    return static_cast<double>(gauss_value(basis, key, j, left_virtual, right_virtual));
  });
}

OperatorMatrix diagonal_operator(const Basis& basis,
                                 const std::function<double(std::uint64_t)>& entry) {
  std::vector<Triplet> triplets;
  triplets.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double v = entry(basis.key(i));
    if (v != 0.0) triplets.emplace_back(i, i, v);
  }
  return from_triplets(basis.size(), triplets);
}

OperatorMatrix particle_number_operator(const Basis& basis) {
  return diagonal_operator(basis, [&](std::uint64_t key) {
    int n = 0;
    for (int j = 1; j <= basis.n_matter(); ++j) n += basis.occupation(key, j);
    return static_cast<double>(n);
  });
}

double max_abs_entry(const OperatorMatrix& m) {
  double best = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (OperatorMatrix::InnerIterator it(m, k); it; ++it) best = std::max(best, std::abs(it.value()));
  return best;
}

}  // namespace lgt
