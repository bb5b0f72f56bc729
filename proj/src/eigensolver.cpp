#include "lgt/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lgt {

using cplx = std::complex<double>;

namespace {

bool before(const cplx& a, const cplx& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  const double scale = std::max({ma, mb, 1e-300});
  if (std::abs(ma - mb) > 1e-12 * scale) return ma > mb;
  return std::arg(a) < std::arg(b);
}

// zlartg: [c s; -conj(s) c] [f; g] = [r; 0]
void givens(cplx f, cplx g, double& c, cplx& s) {
  const double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (af == 0.0) {
    c = 0.0;
    s = std::conj(g) / ag;
    return;
  }
  const double r = std::hypot(af, ag);
  c = af / r;
  s = (f / af) * std::conj(g) / r;
}

// x' = c x + s y ; y' = c y - conj(s) x
template <typename X, typename Y>
void rot(X&& x, Y&& y, double c, cplx s) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const cplx xi = x(i), yi = y(i);
    x(i) = c * xi + s * yi;
    y(i) = c * yi - std::conj(s) * xi;
  }
}

// Swaps diagonal entries k and k+1 of the upper-triangular T, updating the
// Schur vectors Q (as LAPACK ztrexc).
void swap_schur(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index k) {
  const Eigen::Index n = T.rows();
  const cplx t11 = T(k, k), t22 = T(k + 1, k + 1);
  double c;
  cplx s;
  givens(T(k, k + 1), t22 - t11, c, s);
  if (k + 2 < n) rot(T.row(k).tail(n - k - 2), T.row(k + 1).tail(n - k - 2), c, s);
  if (k > 0) rot(T.col(k).head(k), T.col(k + 1).head(k), c, std::conj(s));
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
  rot(Q.col(k), Q.col(k + 1), c, std::conj(s));
}

// Moves the p wanted eigenvalues (largest magnitude) to the leading block.
void order_schur(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index p) {
  const Eigen::Index n = T.rows();
  for (Eigen::Index i = 0; i < std::min(p, n); ++i) {
    Eigen::Index best = i;
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (before(T(j, j), T(best, best))) best = j;
    for (Eigen::Index j = best; j > i; --j) swap_schur(T, Q, j - 1);
  }
}

Eigen::VectorXcd random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

}  // namespace

void sort_by_magnitude(std::vector<cplx>& values) { std::stable_sort(values.begin(), values.end(), before); }

EigsResult eigs_dense(const Eigen::MatrixXcd& m, int n_eigs) {
  EigsResult r;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  std::vector<Eigen::Index> order(m.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return before(es.eigenvalues()(a), es.eigenvalues()(b)); });
  const int k = static_cast<int>(std::min<Eigen::Index>(n_eigs, m.rows()));
  for (int i = 0; i < k; ++i) r.values.push_back(es.eigenvalues()(order[i]));
  if (m.rows() > 0) {
    r.leading_vector = es.eigenvectors().col(order[0]);
    r.leading_vector.normalize();
  }
  r.converged = true;
  return r;
}

EigsResult eigs_largest(const LinearMap& op, Eigen::Index dim, const EigsOptions& opt) {
  if (opt.n_eigs < 1) throw std::invalid_argument("eigensolver needs n_eigs >= 1");
  const int nev = static_cast<int>(std::min<Eigen::Index>(opt.n_eigs, dim));
  int m = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * nev + 12, 30);

  if (dim <= opt.dense_below || dim <= m + 1) {
    Eigen::MatrixXcd M(dim, dim);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim), col(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      e(i) = 1.0;
      op(e, col);
      M.col(i) = col;
      e(i) = 0.0;
    }
    return eigs_dense(M, nev);
  }
  m = static_cast<int>(std::min<Eigen::Index>(m, dim - 1));
  const int keep = std::min(m - 2, std::max(nev + 2, m / 2));

  std::mt19937_64 rng(opt.seed);
  Eigen::MatrixXcd V(dim, m + 1);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  if (opt.start.size() == dim && opt.start.norm() > 0.0)
    V.col(0) = opt.start / opt.start.norm();
  else
    V.col(0) = random_unit(dim, rng);
  int k = 0;  // current factorization size
  Eigen::VectorXcd w(dim);
  EigsResult result;

  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    // Arnoldi expansion k -> m with two passes of classical Gram-Schmidt
    for (int j = k; j < m; ++j) {
      op(V.col(j), w);
      const double wnorm = w.norm();
      Eigen::VectorXcd h = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h;
      const Eigen::VectorXcd h2 = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      H.col(j).head(j + 1) = h;
      double beta = w.norm();
      if (beta <= 1e-14 * std::max(wnorm, h.norm())) {
        // invariant subspace: continue with a fresh orthogonal direction
        H(j + 1, j) = 0.0;
        Eigen::VectorXcd r = random_unit(dim, rng);
        for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
        V.col(j + 1) = r / r.norm();
      } else {
        H(j + 1, j) = beta;
        V.col(j + 1) = w / beta;
      }
    }

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(H.topRows(m));
    Eigen::MatrixXcd T = schur.matrixT();
    Eigen::MatrixXcd Q = schur.matrixU();
    order_schur(T, Q, keep);
    const Eigen::RowVectorXcd b = H(m, m - 1) * Q.row(m - 1);

    const double scale = std::max(std::abs(T(0, 0)), 1e-300);
    double res = 0.0;
    for (int i = 0; i < nev; ++i) res = std::max(res, std::abs(b(i)) / scale);
    result.restarts = restart;
    result.residual = res;
    if (res <= opt.tol || std::abs(T(0, 0)) == 0.0 || restart == opt.max_restarts) {
      result.converged = res <= opt.tol || std::abs(T(0, 0)) == 0.0;
      for (int i = 0; i < nev; ++i) result.values.push_back(T(i, i));
      sort_by_magnitude(result.values);
      result.leading_vector = V.leftCols(m) * Q.col(0);
      result.leading_vector.normalize();
      return result;
    }

    // truncate to the leading block and restart
    const Eigen::MatrixXcd Vk = V.leftCols(m) * Q.leftCols(keep);
    V.col(keep) = V.col(m);
    V.leftCols(keep) = Vk;
    H.setZero();
    H.topLeftCorner(keep, keep) = T.topLeftCorner(keep, keep);
    H.row(keep).head(keep) = b.head(keep);
    k = keep;
  }
  return result;
}

}  // namespace lgt
