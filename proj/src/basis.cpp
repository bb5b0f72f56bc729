#include "lgt/basis.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace lgt {

Basis::Basis(ModelKind kind, LatticeSpec lattice, std::vector<std::uint64_t> keys)
    : kind_(kind), lattice_(lattice), n_links_(basis_links(lattice, kind)), keys_(std::move(keys)) {
  if (!std::is_sorted(keys_.begin(), keys_.end()))
    throw std::invalid_argument("basis keys must be sorted");
}

std::optional<std::size_t> Basis::index_of(std::uint64_t key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys_.begin());
}

std::uint64_t Basis::encode(const ProductStateConfig& config) const {
  if (static_cast<int>(config.occupations.size()) != n_matter() ||
      static_cast<int>(config.links.size()) != n_links_)
    throw std::invalid_argument("configuration does not match the basis lattice");
  std::uint64_t key = 0;
  for (int o : config.occupations) key = (key << 1) | static_cast<std::uint64_t>(o != 0);
  for (int v : config.links) key = (key << 1) | static_cast<std::uint64_t>(v < 0);
  return key;
}

ProductStateConfig Basis::decode(std::uint64_t key) const {
  ProductStateConfig c;
  c.occupations.resize(n_matter());
  c.links.resize(n_links_);
  for (int j = 1; j <= n_matter(); ++j) c.occupations[j - 1] = occupation(key, j);
  for (int j = 1; j <= n_links_; ++j) c.links[j - 1] = link(key, j);
  return c;
}

int basis_links(const LatticeSpec& lattice, ModelKind kind) {
  if (kind == ModelKind::FreeFermion) return 0;
  if (lattice.boundary == Boundary::Infinite)
    throw std::invalid_argument("finite bases need an Open or Periodic lattice");
  return lattice.n_links();
}

namespace {

void check_lattice(const LatticeSpec& lattice) {
  lattice.validate();
  if (lattice.boundary == Boundary::Infinite)
    throw std::invalid_argument("finite bases need an Open or Periodic lattice");
  if (2 * lattice.n_matter > 62) throw std::invalid_argument("lattice too large for 64-bit keys");
}

std::uint64_t pack(std::uint64_t occ, const std::vector<int>& links) {
  std::uint64_t key = occ;
  for (int v : links) key = (key << 1) | static_cast<std::uint64_t>(v < 0);
  return key;
}

// Fills links[0..L-2] from the left boundary value using the Gauss relation of
// sites 1..L-1. Returns false if a U(1) link leaves {+1, -1}.
bool propagate(ModelKind kind, int L, std::uint64_t occ, const GaugeSectorSpec& sector, int left,
               std::vector<int>& links) {
  int prev = left;
  for (int j = 1; j <= L - 1; ++j) {
    const int n = static_cast<int>((occ >> (L - j)) & 1u);
    int v;
    if (kind == ModelKind::Z2LGT) {
      v = sector.g[j - 1] * (n ? -1 : 1) * prev;
    } else {
      const int background = (j % 2 == 0) ? 1 : 0;
      v = prev + 2 * (n - background - sector.g[j - 1]);
      if (v != 1 && v != -1) return false;
    }
    links[j - 1] = v;
    prev = v;
  }
  return true;
}

bool closes(ModelKind kind, int L, std::uint64_t occ, const GaugeSectorSpec& sector, int left_of_L,
            int right_of_L) {
  const int n = static_cast<int>(occ & 1u);
  if (kind == ModelKind::Z2LGT) return (n ? -1 : 1) * left_of_L * right_of_L == sector.g[L - 1];
  const int background = (L % 2 == 0) ? 1 : 0;
  return n - background - (right_of_L - left_of_L) / 2 == sector.g[L - 1];
}

}  // namespace

Basis gauge_sector_basis(const LatticeSpec& lattice, const GaugeSectorSpec& sector, ModelKind kind,
                         std::optional<int> particle_number) {
  check_lattice(lattice);
  const int L = lattice.n_matter;
  if (kind == ModelKind::FreeFermion) return full_basis(lattice, kind, particle_number);
  if (static_cast<int>(sector.g.size()) != L)
    throw std::invalid_argument("gauge sector length must equal the number of matter sites");
  const bool periodic = lattice.boundary == Boundary::Periodic;
  std::vector<std::uint64_t> keys;
  std::vector<int> links(lattice.n_links());
  for (std::uint64_t occ = 0; occ < (std::uint64_t{1} << L); ++occ) {
    if (particle_number && std::popcount(occ) != *particle_number) continue;
    if (!periodic) {
      if (!propagate(kind, L, occ, sector, sector.left_virtual, links)) continue;
      const int left_of_L = (L >= 2) ? links[L - 2] : sector.left_virtual;
      if (closes(kind, L, occ, sector, left_of_L, sector.right_virtual)) keys.push_back(pack(occ, links));
    } else {
      for (int last : {+1, -1}) {
        if (!propagate(kind, L, occ, sector, last, links)) continue;
        links[L - 1] = last;
        if (closes(kind, L, occ, sector, links[L - 2], last)) keys.push_back(pack(occ, links));
      }
    }
  }
  if (keys.empty()) throw std::invalid_argument("gauge sector is empty for this lattice");
  std::sort(keys.begin(), keys.end());
  return Basis(kind, lattice, std::move(keys));
}

Basis full_basis(const LatticeSpec& lattice, ModelKind kind, std::optional<int> particle_number) {
  check_lattice(lattice);
  const int L = lattice.n_matter;
  const int nl = basis_links(lattice, kind);
  std::vector<std::uint64_t> keys;
  for (std::uint64_t occ = 0; occ < (std::uint64_t{1} << L); ++occ) {
    if (particle_number && std::popcount(occ) != *particle_number) continue;
    for (std::uint64_t lk = 0; lk < (std::uint64_t{1} << nl); ++lk) keys.push_back((occ << nl) | lk);
  }
  if (keys.empty()) throw std::invalid_argument("basis is empty");
  return Basis(kind, lattice, std::move(keys));
}

}  // namespace lgt
