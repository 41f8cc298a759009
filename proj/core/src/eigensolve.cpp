#include "eigensolve.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "decaylab/error.hpp"

namespace decaylab::detail {

EigenBlock tridiagonal_pairs(const SparseMatrix& h, std::size_t first, std::size_t last) {
  EigenBlock out;
  const auto n = static_cast<lapack_int>(h.rows());
  if (first > last || n == 0) {
    out.vectors.resize(h.rows(), 0);
    return out;
  }
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  std::vector<double> e(static_cast<std::size_t>(std::max<lapack_int>(n - 1, 1)), 0.0);
  for (int c = 0; c < h.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(h, c); it; ++it) {
      if (it.row() == it.col()) d[it.row()] += it.value();
      if (it.row() == it.col() + 1) e[it.col()] = it.value();
    }
  }
  const auto count = static_cast<lapack_int>(last - first + 1);
  lapack_int found = 0;
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0,
                                         static_cast<lapack_int>(first), static_cast<lapack_int>(last), abstol,
                                         &found, w.data(), z.data(), n, ifail.data());
  if (info < 0) throw Error("dstevx rejected its arguments");
  out.energies.assign(w.begin(), w.begin() + found);
  out.vectors = z.leftCols(found);
  return out;
}

EigenBlock dense_pairs(const SparseMatrix& h) {
  const Eigen::MatrixXd full(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(full);
  if (solver.info() != Eigen::Success) throw Error("dense eigensolver did not converge");
  EigenBlock out;
  out.energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  out.vectors = solver.eigenvectors();
  return out;
}

EigenBlock rayleigh_ritz(const SparseMatrix& h, const Eigen::MatrixXd& basis) {
  EigenBlock out;
  if (basis.cols() == 0) {
    out.vectors.resize(h.rows(), 0);
    return out;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
  const Eigen::MatrixXd hq = h * q;
  Eigen::MatrixXd projected = q.transpose() * hq;
  projected = 0.5 * (projected + projected.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(projected);
  out.energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  out.vectors = q * solver.eigenvectors();
  return out;
}

namespace {

void orthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index cols) {
  // Two passes of classical Gram-Schmidt keep the basis orthogonal to working precision.
  for (int pass = 0; pass < 2; ++pass) {
    if (cols == 0) return;
    const Eigen::VectorXd coeff = basis.leftCols(cols).transpose() * v;
    v.noalias() -= basis.leftCols(cols) * coeff;
  }
}

}  // namespace

EigenBlock lanczos_slice(const SparseMatrix& h, double lo, double hi, std::size_t expected, double tolerance,
                         int max_restarts) {
  const Eigen::Index n = h.rows();
  EigenBlock out;
  out.vectors.resize(n, 0);
  if (expected == 0) return out;

  double sigma = 0.5 * (lo + hi);
  SparseMatrix shifted = h;
  {
    SparseMatrix eye(n, n);
    eye.setIdentity();
    shifted = h - sigma * eye;
  }
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> factor(shifted);
  for (int attempt = 0; factor.info() != Eigen::Success && attempt < 8; ++attempt) {
    sigma += 1e-7 * (hi - lo);
    SparseMatrix eye(n, n);
    eye.setIdentity();
    shifted = h - sigma * eye;
    factor.compute(shifted);
  }
  if (factor.info() != Eigen::Success) throw Error("shift-invert factorization failed");

  Eigen::MatrixXd locked(n, static_cast<Eigen::Index>(expected));
  Eigen::Index nlocked = 0;
  std::mt19937_64 rng(0x5eedULL ^ static_cast<std::uint64_t>(n));
  std::normal_distribution<double> gauss;

  std::size_t steps = std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(40, 3 * expected + 20));
  for (int restart = 0; restart <= max_restarts && static_cast<std::size_t>(nlocked) < expected; ++restart) {
    const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(steps, static_cast<std::size_t>(n - nlocked)));
    if (m <= 0) break;
    Eigen::MatrixXd q(n, m);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);

    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
    orthogonalize(v, locked, nlocked);
    v.normalize();
    Eigen::Index built = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      q.col(j) = v;
      built = j + 1;
      Eigen::VectorXd w = factor.solve(v);
      alpha[j] = v.dot(w);
      orthogonalize(w, locked, nlocked);
      orthogonalize(w, q, j + 1);
      const double b = w.norm();
      if (j + 1 == m) break;
      if (b < 1e-14 * std::max(1.0, std::abs(alpha[j]))) {
        // Invariant subspace: continue from a fresh direction.
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) r[i] = gauss(rng);
        orthogonalize(r, locked, nlocked);
        orthogonalize(r, q, j + 1);
        if (r.norm() < 1e-12) break;
        beta[j] = 0.0;
        v = r.normalized();
      } else {
        beta[j] = b;
        v = w / b;
      }
    }

    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(built, built);
    for (Eigen::Index j = 0; j < built; ++j) {
      t(j, j) = alpha[j];
      if (j + 1 < built) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolve(t);
    const Eigen::MatrixXd ritz = q.leftCols(built) * tsolve.eigenvectors();
    for (Eigen::Index i = 0; i < built && static_cast<std::size_t>(nlocked) < expected; ++i) {
      const double theta = tsolve.eigenvalues()[i];
      if (std::abs(theta) < 1e-300) continue;
      const double energy = sigma + 1.0 / theta;
      if (!(energy > lo && energy <= hi)) continue;
      Eigen::VectorXd x = ritz.col(i);
      orthogonalize(x, locked, nlocked);
      const double nx = x.norm();
      if (nx < 0.5) continue;
      x /= nx;
      const double rq = x.dot(h * x);
      const double residual = (h * x - rq * x).norm();
      if (residual > tolerance || !(rq > lo && rq <= hi)) continue;
      locked.col(nlocked++) = x;
    }
    steps = std::min<std::size_t>(static_cast<std::size_t>(n), 2 * steps);
  }

  return rayleigh_ritz(h, locked.leftCols(nlocked));
}

}  // namespace decaylab::detail
