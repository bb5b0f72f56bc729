#pragma once

// Model definitions for the 1+1D Z2 lattice gauge theory and its limits.
//
// Conventions (used everywhere in the library):
//
//   * Matter sites are 1-based, j = 1..L. The link (j, j+1) is "link j".
//     On a periodic chain link L joins site L to site 1.
//   * H_mu = mu * sum_j (-1)^j n_j, so odd sites are favoured for mu > 0.
//   * H_h  = -h * sum_links tau^x. Links are stored in the tau^x eigenbasis
//     as a sign v = +1 / -1. For the U(1) quantum link model the same sign
//     stores v = 2 s^z.
//   * H_J  = -(J/2) * sum_j (phi_j^dag tau^z_j phi_{j+1} + h.c.). The factor
//     1/2 is the XX-chain normalization: with it the mu = h = 0 quench from
//     a staggered state gives N_d(t) = J_0(2 J t) and cusps at (n + 1/2) pi / J.
//   * Z2 Gauss law:  G_j = (-1)^{n_j} tau^x_{j-1} tau^x_j.
//   * U(1) Gauss law: G_j = n_j - (1 + (-1)^j)/2 - (s^z_j - s^z_{j-1}).
//
// Named product states (one two-site cell shown, odd site first):
//
//   name  matter (odd, even)  link sign (odd link, even link)  kind
//   fp+   (1, 0)              (+1, +1)                         Z2
//   fp-   (1, 0)              (-1, -1)                         Z2
//   sl+   (0, 1)              (-1, +1)                         Z2
//   sl-   (0, 1)              (+1, -1)                         Z2
//   CP    (1, 0)              (+1, -1)   i.e. |1, +1/2, 0, -1/2>  U1QLM
//   vac+  (0, 1)              (+1, +1)   i.e. |0, +1/2, 1, +1/2>  U1QLM
//   vac-  (0, 1)              (-1, -1)                         U1QLM

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lgt {

enum class ModelKind { Z2LGT, FreeFermion, U1QLM };
enum class Boundary { Open, Periodic, Infinite };

std::string to_string(ModelKind kind);
std::string to_string(Boundary boundary);
ModelKind parse_model_kind(const std::string& text);
Boundary parse_boundary(const std::string& text);

struct ModelParams {
  ModelKind kind = ModelKind::Z2LGT;
  double J = 1.0;
  double mu = 0.0;
  double h = 0.0;
  double delta = 0.0;  // even-link bias, U1QLM only

  void validate() const;
};

struct LatticeSpec {
  int n_matter = 2;
  Boundary boundary = Boundary::Infinite;
  /// Fermion boundary sign on the periodic wrap bond (+1 periodic, -1 antiperiodic).
  int twist = +1;

  /// Number of links carried by the chain (Open: L-1, Periodic: L, Infinite: per cell).
  int n_links() const;
  /// Physical sites per translation unit cell of the infinite chain.
  static constexpr int unit_cell = 4;
  static constexpr int matter_per_cell = 2;

  void validate() const;
};

/// Eigenvalues g_j of the Gauss operators plus the fixed values of the two
/// virtual links used on open chains.
struct GaugeSectorSpec {
  std::vector<int> g;
  int left_virtual = +1;
  int right_virtual = +1;
};

struct ProductStateConfig {
  std::vector<int> occupations;  // n_j in {0, 1}
  std::vector<int> links;        // link sign in {+1, -1}; empty for FreeFermion
  std::optional<std::string> name;

  int particle_number() const;
  bool operator==(const ProductStateConfig& other) const {
    return occupations == other.occupations && links == other.links;
  }
  bool operator<(const ProductStateConfig& other) const {
    return occupations != other.occupations ? occupations < other.occupations
                                            : links < other.links;
  }
};

/// Sign appearing in the link-sector relation: +1 on even sites, -1 on odd ones.
inline int stagger(int j) { return (j % 2 == 0) ? 1 : -1; }

const std::vector<std::string>& named_state_labels();
/// Model kind implied by a state name (fp/sl -> Z2LGT, CP/vac -> U1QLM).
ModelKind kind_of_name(const std::string& name);
/// True when the state starts with odd sites occupied (fp, CP).
bool odd_sites_occupied(const std::string& name);

ProductStateConfig named_state(const std::string& name, const LatticeSpec& lattice);

/// Drops the link degrees of freedom (free-fermion image of a gauge state).
ProductStateConfig matter_only(const ProductStateConfig& config);

/// Reference Z2 sector: g_j = -1 on odd j, +1 on even j; virtual links +1.
GaugeSectorSpec reference_sector(const LatticeSpec& lattice, ModelKind kind);

/// Gauss eigenvalues of a product configuration. On open chains the virtual
/// links are taken from the supplied sector (defaults to the reference one).
std::vector<int> gauss_eigenvalues(const ProductStateConfig& config, const LatticeSpec& lattice,
                                   ModelKind kind, int left_virtual = +1, int right_virtual = +1);

/// Sector containing the configuration, with open-chain virtual links chosen
/// as the periodic continuation of the configuration.
GaugeSectorSpec sector_of(const ProductStateConfig& config, const LatticeSpec& lattice,
                          ModelKind kind);

/// <config| H_mu + H_h (+ H_delta) |config> per four-site unit cell.
double classical_energy(const ProductStateConfig& config, const ModelParams& params);

/// Configurations reached from a cell-periodic configuration by one
/// gauge-invariant hop applied identically in every unit cell.
std::set<ProductStateConfig> transitional_manifold(const ProductStateConfig& config,
                                                   const LatticeSpec& lattice, ModelKind kind);

/// Attaches a name when the configuration equals one of the named states.
ProductStateConfig label_config(ProductStateConfig config, const LatticeSpec& lattice);

/// Name of the fully polarized state that is resonant with the staggered-link
/// states for the given couplings, if any.
std::optional<std::string> resonant_fp_state(const ModelParams& params);

/// Matter/link map from the Z2 frame to the U(1) quantum-link frame:
/// v_j -> (-1)^j v_j, matter unchanged.
ProductStateConfig z2_to_qlm_frame(const ProductStateConfig& config);

}  // namespace lgt
