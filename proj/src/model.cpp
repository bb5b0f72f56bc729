#include "lgt/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lgt {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Z2LGT: return "Z2LGT";
    case ModelKind::FreeFermion: return "FreeFermion";
    case ModelKind::U1QLM: return "U1QLM";
  }
  return "?";
}

std::string to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::Open: return "Open";
    case Boundary::Periodic: return "Periodic";
    case Boundary::Infinite: return "Infinite";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "Z2LGT" || text == "Z2") return ModelKind::Z2LGT;
  if (text == "FreeFermion") return ModelKind::FreeFermion;
  if (text == "U1QLM" || text == "QLM") return ModelKind::U1QLM;
  throw std::invalid_argument("unknown model kind '" + text + "'");
}

Boundary parse_boundary(const std::string& text) {
  if (text == "Open") return Boundary::Open;
  if (text == "Periodic") return Boundary::Periodic;
  if (text == "Infinite") return Boundary::Infinite;
  throw std::invalid_argument("unknown boundary '" + text + "'");
}

void ModelParams::validate() const {
  if (!(J > 0.0) || !std::isfinite(J)) throw std::invalid_argument("model.J must be > 0");
  if (!std::isfinite(mu) || !std::isfinite(h) || !std::isfinite(delta))
    throw std::invalid_argument("model couplings must be finite");
}

int LatticeSpec::n_links() const {
  switch (boundary) {
    case Boundary::Open: return n_matter - 1;
    case Boundary::Periodic: return n_matter;
    case Boundary::Infinite: return matter_per_cell;
  }
  return 0;
}

void LatticeSpec::validate() const {
  if (boundary == Boundary::Infinite) {
    if (n_matter != matter_per_cell)
      throw std::invalid_argument("infinite lattice describes one unit cell (2 matter sites)");
    return;
  }
  if (n_matter < 2) throw std::invalid_argument("lattice needs at least 2 matter sites");
  if (n_matter % 2 != 0) throw std::invalid_argument("lattice size L must be even");
  if (twist != 1 && twist != -1) throw std::invalid_argument("lattice twist must be +1 or -1");
}

int ProductStateConfig::particle_number() const {
  int n = 0;
  for (int o : occupations) n += o;
  return n;
}

const std::vector<std::string>& named_state_labels() {
  static const std::vector<std::string> labels = {"fp+", "fp-", "sl+", "sl-", "CP", "vac+", "vac-"};
  return labels;
}

ModelKind kind_of_name(const std::string& name) {
  if (name == "fp+" || name == "fp-" || name == "sl+" || name == "sl-") return ModelKind::Z2LGT;
  if (name == "CP" || name == "vac+" || name == "vac-") return ModelKind::U1QLM;
  throw std::invalid_argument("unknown state name '" + name + "'");
}

bool odd_sites_occupied(const std::string& name) {
  kind_of_name(name);
  return name == "fp+" || name == "fp-" || name == "CP";
}

namespace {

// Matter occupation and link sign on odd / even indices.
struct CellPattern {
  int odd_n, even_n, odd_link, even_link;
};

CellPattern pattern_of(const std::string& name) {
  if (name == "fp+") return {1, 0, +1, +1};
  if (name == "fp-") return {1, 0, -1, -1};
  if (name == "sl+") return {0, 1, -1, +1};
  if (name == "sl-") return {0, 1, +1, -1};
  if (name == "CP") return {1, 0, +1, -1};
  if (name == "vac+") return {0, 1, +1, +1};
  if (name == "vac-") return {0, 1, -1, -1};
  throw std::invalid_argument("unknown state name '" + name + "'");
}

// Link sign on link j (1-based), continued periodically beyond the stored
// links. Open chains continue with the value of the same-parity link.
int link_at(const ProductStateConfig& c, int j) {
  const int n = static_cast<int>(c.occupations.size());
  const int stored = static_cast<int>(c.links.size());
  if (stored == n) return c.links[((j - 1) % n + n) % n];
  if (j >= 1 && j <= stored) return c.links[j - 1];
  const bool odd = ((j % 2) + 2) % 2 == 1;
  return (odd || stored < 2) ? c.links.at(0) : c.links.at(1);
}

}  // namespace

ProductStateConfig named_state(const std::string& name, const LatticeSpec& lattice) {
  const CellPattern p = pattern_of(name);
  lattice.validate();
  const int L = lattice.n_matter;
  ProductStateConfig c;
  c.occupations.resize(L);
  for (int j = 1; j <= L; ++j) c.occupations[j - 1] = (j % 2 == 1) ? p.odd_n : p.even_n;
  c.links.resize(lattice.n_links());
  for (int j = 1; j <= lattice.n_links(); ++j)
    c.links[j - 1] = (j % 2 == 1) ? p.odd_link : p.even_link;
  c.name = name;
  return c;
}

ProductStateConfig matter_only(const ProductStateConfig& config) {
  ProductStateConfig c;
  c.occupations = config.occupations;
  c.name = config.name;
  return c;
}

GaugeSectorSpec reference_sector(const LatticeSpec& lattice, ModelKind kind) {
  GaugeSectorSpec s;
  s.g.resize(lattice.n_matter);
  for (int j = 1; j <= lattice.n_matter; ++j)
    s.g[j - 1] = (kind == ModelKind::U1QLM) ? 0 : stagger(j);
  return s;
}

std::vector<int> gauss_eigenvalues(const ProductStateConfig& config, const LatticeSpec& lattice,
                                   ModelKind kind, int left_virtual, int right_virtual) {
  if (kind == ModelKind::FreeFermion)
    throw std::invalid_argument("free-fermion model has no Gauss law");
  const int L = static_cast<int>(config.occupations.size());
  const bool open = lattice.boundary == Boundary::Open;
  auto link = [&](int j) -> int {
    if (open) {
      if (j <= 0) return left_virtual;
      if (j >= L) return right_virtual;
      return config.links.at(j - 1);
    }
    return config.links.at(((j - 1) % L + L) % L);
  };
  std::vector<int> g(L);
  for (int j = 1; j <= L; ++j) {
    const int n = config.occupations[j - 1];
    if (kind == ModelKind::Z2LGT) {
      g[j - 1] = (n ? -1 : 1) * link(j - 1) * link(j);
    } else {
      const int background = (j % 2 == 0) ? 1 : 0;
      // s = v/2, so s_j - s_{j-1} = (v_j - v_{j-1}) / 2 is an integer here
      g[j - 1] = n - background - (link(j) - link(j - 1)) / 2;
    }
  }
  return g;
}

GaugeSectorSpec sector_of(const ProductStateConfig& config, const LatticeSpec& lattice,
                          ModelKind kind) {
  GaugeSectorSpec s;
  const int L = static_cast<int>(config.occupations.size());
  if (lattice.boundary == Boundary::Open) {
    // the link left of site 1 has index 0 (even), the one right of site L has index L (even)
    s.left_virtual = link_at(config, 0);
    s.right_virtual = link_at(config, L);
  }
  s.g = gauss_eigenvalues(config, lattice, kind, s.left_virtual, s.right_virtual);
  return s;
}

double classical_energy(const ProductStateConfig& config, const ModelParams& params) {
  const int L = static_cast<int>(config.occupations.size());
  if (L == 0 || L % 2 != 0) throw std::invalid_argument("configuration must cover whole cells");
  double e = 0.0;
  if (params.kind == ModelKind::Z2LGT) {
    for (int j = 1; j <= L; ++j) e += params.mu * stagger(j) * config.occupations[j - 1];
    for (int v : config.links) e += -params.h * v;
  } else if (params.kind == ModelKind::U1QLM) {
    for (std::size_t j = 1; j <= config.links.size(); ++j)
      if (j % 2 == 0) e += params.delta * 0.5 * config.links[j - 1];
  }
  const double cells = static_cast<double>(L) / LatticeSpec::matter_per_cell;
  return e / cells;
}

namespace {

// Attempts a hop across link j (between matter j and j+1) moving a particle
// in direction dir (+1: j -> j+1, -1: j+1 -> j). Returns false if forbidden.
bool apply_hop(ProductStateConfig& c, int j, int dir, ModelKind kind, int L) {
  const int a = j - 1;
  const int b = j % L;  // site j+1, wrapping on periodic chains
  const int from = dir > 0 ? a : b;
  const int to = dir > 0 ? b : a;
  if (c.occupations[from] != 1 || c.occupations[to] != 0) return false;
  if (kind == ModelKind::U1QLM) {
    // rightward hop lowers s^z, leftward raises it
    const int want = dir > 0 ? +1 : -1;
    if (c.links[j - 1] != want) return false;
  }
  c.occupations[from] = 0;
  c.occupations[to] = 1;
  if (kind != ModelKind::FreeFermion) c.links[j - 1] = -c.links[j - 1];
  return true;
}

}  // namespace

std::set<ProductStateConfig> transitional_manifold(const ProductStateConfig& config,
                                                   const LatticeSpec& lattice, ModelKind kind) {
  const int L = static_cast<int>(config.occupations.size());
  if (L % 2 != 0) throw std::invalid_argument("configuration must cover whole cells");
  for (int j = 3; j <= L; ++j)
    if (config.occupations[j - 1] != config.occupations[j - 3])
      throw std::invalid_argument("configuration is not unit-cell periodic");
  // uniform hops need a link on every bond of the chosen parity, so treat the
  // configuration as a periodic ring of L sites
  ProductStateConfig ring = config;
  if (kind != ModelKind::FreeFermion) {
    ring.links.resize(L);
    for (int j = 1; j <= L; ++j) ring.links[j - 1] = link_at(config, j);
  }
  std::set<ProductStateConfig> result;
  for (int parity : {1, 2}) {
    for (int dir : {+1, -1}) {
      ProductStateConfig c = ring;
      bool ok = true;
      for (int j = parity; j <= L && ok; j += 2) ok = apply_hop(c, j, dir, kind, L);
      if (!ok) continue;
      if (kind != ModelKind::FreeFermion) c.links.resize(config.links.size());
      c.name.reset();
      LatticeSpec named_lattice = lattice;
      if (named_lattice.boundary == Boundary::Infinite) named_lattice = {L, Boundary::Periodic};
      result.insert(label_config(c, named_lattice));
    }
  }
  return result;
}

ProductStateConfig label_config(ProductStateConfig config, const LatticeSpec& lattice) {
  config.name.reset();
  LatticeSpec lat = lattice;
  lat.n_matter = static_cast<int>(config.occupations.size());
  if (lat.boundary == Boundary::Infinite && lat.n_matter != LatticeSpec::matter_per_cell)
    lat.boundary = Boundary::Periodic;
  for (const auto& name : named_state_labels()) {
    ProductStateConfig candidate = named_state(name, lat);
    if (config.links.empty()) candidate.links.clear();
    if (candidate == config) {
      config.name = name;
      break;
    }
  }
  return config;
}

std::optional<std::string> resonant_fp_state(const ModelParams& params) {
  if (params.kind != ModelKind::Z2LGT) return std::nullopt;
  const LatticeSpec cell{2, Boundary::Infinite};
  const double e_sl = classical_energy(named_state("sl+", cell), params);
  const double e_plus = classical_energy(named_state("fp+", cell), params);
  const double e_minus = classical_energy(named_state("fp-", cell), params);
  const double scale = 1e-12 * (1.0 + std::abs(params.mu) + std::abs(params.h));
  const bool plus = std::abs(e_plus - e_sl) <= scale;
  const bool minus = std::abs(e_minus - e_sl) <= scale;
  if (plus == minus) return std::nullopt;  // none, or fully degenerate point
  return plus ? std::string("fp+") : std::string("fp-");
}

ProductStateConfig z2_to_qlm_frame(const ProductStateConfig& config) {
  ProductStateConfig c = config;
  for (std::size_t j = 1; j <= c.links.size(); ++j) c.links[j - 1] *= stagger(static_cast<int>(j));
  c.name.reset();
  return c;
}

}  // namespace lgt
