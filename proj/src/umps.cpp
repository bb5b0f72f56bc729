#include "lgt/umps.hpp"

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "lgt/bond_hamiltonian.hpp"
#include "lgt/eigensolver.hpp"

namespace lgt {

UniformMPS product_to_umps(const ProductStateConfig& config, ModelKind kind) {
  const int L = static_cast<int>(config.occupations.size());
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("configuration must cover whole unit cells");
  for (int j = 2; j < L; ++j)
    if (config.occupations[j] != config.occupations[j - 2])
      throw std::invalid_argument("configuration is not unit-cell periodic");
  const bool links = kind != ModelKind::FreeFermion;
  if (links) {
    if (config.links.size() < 2) throw std::invalid_argument("gauge configuration needs two links per cell");
    for (std::size_t j = 2; j < config.links.size(); ++j)
      if (config.links[j] != config.links[j - 2])
        throw std::invalid_argument("configuration is not unit-cell periodic");
  }
  UniformMPS psi;
  psi.kind = kind;
  psi.d = local_dim(kind);
  for (int i = 0; i < 2; ++i) {
    psi.B[i].assign(psi.d, Eigen::MatrixXcd::Zero(1, 1));
    psi.B[i][local_index(kind, config.occupations[i], links ? config.links[i] : 1)](0, 0) = 1.0;
    psi.lambda[i] = Eigen::VectorXd::Ones(1);
  }
  return psi;
}

SiteTensor cell_tensor(const UniformMPS& psi) {
  SiteTensor c(psi.d * psi.d);
  for (int s = 0; s < psi.d; ++s)
    for (int t = 0; t < psi.d; ++t) c[s * psi.d + t] = psi.B[0][s] * psi.B[1][t];
  return c;
}

CanonicalResiduals canonical_residuals(const UniformMPS& psi) {
  CanonicalResiduals r;
  for (int i = 0; i < 2; ++i) {
    const int next = (i + 1) % 2;
    const int cl = psi.chi(i), cr = psi.chi(next);
    Eigen::MatrixXcd right = Eigen::MatrixXcd::Zero(cl, cl);
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(cr, cr);
    const Eigen::VectorXd l2 = psi.lambda[i].array().square();
    for (const auto& b : psi.B[i]) {
      right += b * b.adjoint();
      left += b.adjoint() * l2.asDiagonal() * b;
    }
    right -= Eigen::MatrixXcd::Identity(cl, cl);
    left -= psi.lambda[next].array().square().matrix().asDiagonal();
    r.right = std::max(r.right, right.cwiseAbs().maxCoeff());
    r.left = std::max(r.left, left.cwiseAbs().maxCoeff());
  }
  return r;
}

namespace {

// Hermitian PSD fixed point of X -> sum_s C X C^dag (right) or C^dag X C (left).
Eigen::MatrixXcd fixed_point(const SiteTensor& c, bool right, const Eigen::MatrixXcd& guess) {
  const Eigen::Index chi = guess.rows();
  LinearMap op = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    Eigen::Map<const Eigen::MatrixXcd> X(in.data(), chi, chi);
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(chi, chi);
    for (const auto& m : c) Y.noalias() += right ? Eigen::MatrixXcd(m * X * m.adjoint()) : Eigen::MatrixXcd(m.adjoint() * X * m);
    out = Eigen::Map<Eigen::VectorXcd>(Y.data(), chi * chi);
  };
  EigsOptions opt;
  opt.n_eigs = 1;
  opt.tol = 1e-13;
  opt.start = Eigen::Map<const Eigen::VectorXcd>(guess.data(), chi * chi);
  const EigsResult res = eigs_largest(op, chi * chi, opt);
  Eigen::MatrixXcd X = Eigen::Map<const Eigen::MatrixXcd>(res.leading_vector.data(), chi, chi);
  const cplx tr = X.trace();
  X /= tr / std::abs(tr);
  return 0.5 * (X + X.adjoint());
}

}  // namespace

void canonicalize(UniformMPS& psi, double cutoff) {
  const int d = psi.d;
  const int chi = psi.chi(0);
  SiteTensor c = cell_tensor(psi);

  const Eigen::MatrixXcd R = fixed_point(c, true, Eigen::MatrixXcd::Identity(chi, chi));
  const Eigen::MatrixXcd Lfp =
      fixed_point(c, false, Eigen::MatrixXcd(psi.lambda[0].array().square().matrix().asDiagonal()));

  // R = X X^dag, L = Y^dag Y restricted to the numerically nonzero support
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> er(R), el(Lfp);
  const double rmax = er.eigenvalues().cwiseAbs().maxCoeff(), lmax = el.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> rk, lk;
  for (int k = 0; k < chi; ++k) {
    if (er.eigenvalues()(k) > cutoff * cutoff * rmax) rk.push_back(k);
    if (el.eigenvalues()(k) > cutoff * cutoff * lmax) lk.push_back(k);
  }
  Eigen::MatrixXcd X(chi, rk.size()), Xinv(rk.size(), chi), Y(lk.size(), chi);
  for (std::size_t q = 0; q < rk.size(); ++q) {
    const double s = std::sqrt(er.eigenvalues()(rk[q]));
    X.col(q) = er.eigenvectors().col(rk[q]) * s;
    Xinv.row(q) = er.eigenvectors().col(rk[q]).adjoint() / s;
  }
  for (std::size_t q = 0; q < lk.size(); ++q)
    Y.row(q) = el.eigenvectors().col(lk[q]).adjoint() * std::sqrt(el.eigenvalues()(lk[q]));

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Y * X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > cutoff * sv(0)) ++r;
  const Eigen::MatrixXcd V2 = svd.matrixV().leftCols(r);
  const Eigen::MatrixXcd left = V2.adjoint() * Xinv;  // r x chi
  const Eigen::MatrixXcd right = X * V2;              // chi x r
  for (auto& m : c) m = left * m * right;
  Eigen::VectorXd lam0 = sv.head(r);
  lam0 /= lam0.norm();

  // normalize the cell so that sum_s C C^dag = 1
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(r, r);
  for (const auto& m : c) acc += m * m.adjoint();
  const double eta = acc.trace().real() / r;
  for (auto& m : c) m /= std::sqrt(eta);

  // split the cell: theta = diag(lambda0) C, rows (s0, a), cols (s1, b)
  Eigen::MatrixXcd theta_tilde(d * r, d * r);
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) theta_tilde.block(s * r, t * r, r, r) = c[s * d + t];
  Eigen::MatrixXcd theta = theta_tilde;
  for (int s = 0; s < d; ++s) theta.middleRows(s * r, r) = lam0.asDiagonal() * theta.middleRows(s * r, r);
  Eigen::BDCSVD<Eigen::MatrixXcd> split(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s1 = split.singularValues();
  int r1 = 0;
  while (r1 < s1.size() && s1(r1) > cutoff * s1(0)) ++r1;
  const Eigen::MatrixXcd V1 = split.matrixV().leftCols(r1);
  const Eigen::MatrixXcd B0 = theta_tilde * V1;
  for (int s = 0; s < d; ++s) {
    psi.B[0][s] = B0.middleRows(s * r, r);
    psi.B[1][s] = V1.middleRows(s * r, r).adjoint();
  }
  psi.lambda[0] = lam0;
  psi.lambda[1] = s1.head(r1) / s1.head(r1).norm();
}

UniformMPS time_reversed(const UniformMPS& psi) {
  UniformMPS out = psi;
  for (auto& site : out.B)
    for (auto& m : site) m = m.conjugate().eval();
  out.time = -psi.time;
  return out;
}

double site_expectation(const UniformMPS& psi, int i, const Eigen::VectorXd& diagonal) {
  double num = 0.0, den = 0.0;
  for (int s = 0; s < psi.d; ++s) {
    const double w = (psi.lambda[i].asDiagonal() * psi.B[i][s]).squaredNorm();
    num += diagonal(s) * w;
    den += w;
  }
  return num / den;
}

cplx bond_expectation(const UniformMPS& psi, int i, const Eigen::MatrixXd& h) {
  const int d = psi.d, next = (i + 1) % 2;
  std::vector<Eigen::MatrixXcd> theta(d * d);
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) theta[s * d + t] = psi.lambda[i].asDiagonal() * psi.B[i][s] * psi.B[next][t];
  cplx num = 0.0;
  double den = 0.0;
  for (int p = 0; p < d * d; ++p) {
    den += theta[p].squaredNorm();
    for (int q = 0; q < d * d; ++q)
      if (h(p, q) != 0.0) num += h(p, q) * (theta[p].conjugate().cwiseProduct(theta[q])).sum();
  }
  return num / den;
}

namespace {

constexpr char kMagic[8] = {'L', 'G', 'T', 'U', 'M', 'P', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated MPS snapshot");
  return v;
}

}  // namespace

void write_snapshot(std::ostream& out, const UniformMPS& psi, const std::string& metadata) {
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, static_cast<std::int32_t>(psi.kind));
  put(out, static_cast<std::int32_t>(psi.d));
  put(out, psi.time);
  put(out, psi.truncated_weight);
  for (int i = 0; i < 2; ++i) {
    put(out, static_cast<std::uint64_t>(psi.lambda[i].size()));
    out.write(reinterpret_cast<const char*>(psi.lambda[i].data()), sizeof(double) * psi.lambda[i].size());
  }
  for (int i = 0; i < 2; ++i) {
    put(out, static_cast<std::uint64_t>(psi.B[i].front().rows()));
    put(out, static_cast<std::uint64_t>(psi.B[i].front().cols()));
    for (const auto& m : psi.B[i]) out.write(reinterpret_cast<const char*>(m.data()), sizeof(cplx) * m.size());
  }
  put(out, static_cast<std::uint64_t>(metadata.size()));
  out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));
  if (!out) throw std::runtime_error("failed to write MPS snapshot");
}

UniformMPS read_snapshot(std::istream& in, std::string* metadata) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("not an MPS snapshot");
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported MPS snapshot version");
  UniformMPS psi;
  psi.kind = static_cast<ModelKind>(get<std::int32_t>(in));
  psi.d = get<std::int32_t>(in);
  if (psi.d != local_dim(psi.kind)) throw std::runtime_error("snapshot has inconsistent local dimension");
  psi.time = get<double>(in);
  psi.truncated_weight = get<double>(in);
  for (int i = 0; i < 2; ++i) {
    const auto n = get<std::uint64_t>(in);
    psi.lambda[i].resize(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(psi.lambda[i].data()), static_cast<std::streamsize>(sizeof(double) * n));
  }
  for (int i = 0; i < 2; ++i) {
    const auto rows = get<std::uint64_t>(in), cols = get<std::uint64_t>(in);
    if (rows != static_cast<std::uint64_t>(psi.lambda[i].size()) ||
        cols != static_cast<std::uint64_t>(psi.lambda[(i + 1) % 2].size()))
      throw std::runtime_error("snapshot tensor shapes do not match its Schmidt values");
    psi.B[i].assign(psi.d, Eigen::MatrixXcd(rows, cols));
    for (auto& m : psi.B[i]) in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(cplx) * m.size()));
  }
  const auto n = get<std::uint64_t>(in);
  std::string meta(n, '\0');
  in.read(meta.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated MPS snapshot");
  if (metadata) *metadata = std::move(meta);
  return psi;
}

}  // namespace lgt
