#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lgt/model.hpp"

namespace lgt {

/// Enumerated product basis of a finite chain.
///
/// A basis state is packed into a 64-bit key: the occupation bits come first
/// (site 1 most significant), followed by the link bits (link 1 most
/// significant, bit set <=> link sign -1). Keys are stored in ascending
/// order, which is the lexicographic order over (occupations, links) with
/// n = 0 before 1 and link +1 before -1.
class Basis {
 public:
  Basis(ModelKind kind, LatticeSpec lattice, std::vector<std::uint64_t> keys);

  ModelKind kind() const { return kind_; }
  const LatticeSpec& lattice() const { return lattice_; }
  std::size_t size() const { return keys_.size(); }
  int n_matter() const { return lattice_.n_matter; }
  int n_links() const { return n_links_; }

  std::uint64_t key(std::size_t i) const { return keys_[i]; }
  const std::vector<std::uint64_t>& keys() const { return keys_; }
  std::optional<std::size_t> index_of(std::uint64_t key) const;

  /// Occupation of matter site j (1-based).
  int occupation(std::uint64_t key, int j) const {
    return static_cast<int>((key >> (n_links_ + n_matter() - j)) & 1u);
  }
  /// Sign of link j (1-based).
  int link(std::uint64_t key, int j) const {
    return ((key >> (n_links_ - j)) & 1u) ? -1 : +1;
  }
  std::uint64_t flip_occupation(std::uint64_t key, int j) const {
    return key ^ (std::uint64_t{1} << (n_links_ + n_matter() - j));
  }
  std::uint64_t flip_link(std::uint64_t key, int j) const {
    return key ^ (std::uint64_t{1} << (n_links_ - j));
  }

  std::uint64_t encode(const ProductStateConfig& config) const;
  ProductStateConfig decode(std::uint64_t key) const;

 private:
  ModelKind kind_;
  LatticeSpec lattice_;
  int n_links_;
  std::vector<std::uint64_t> keys_;
};

/// Number of links carried by a finite basis of the given kind.
int basis_links(const LatticeSpec& lattice, ModelKind kind);

/// All product states in the given gauge sector, optionally restricted to a
/// fixed particle number. Throws if the sector is empty.
Basis gauge_sector_basis(const LatticeSpec& lattice, const GaugeSectorSpec& sector, ModelKind kind,
                         std::optional<int> particle_number = std::nullopt);

/// Unprojected basis: every occupation and link pattern.
Basis full_basis(const LatticeSpec& lattice, ModelKind kind,
                 std::optional<int> particle_number = std::nullopt);

}  // namespace lgt
