#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "decaylab/error.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

std::string to_string(CountMethod m) {
  switch (m) {
    case CountMethod::Sturm:
      return "sturm";
    case CountMethod::SparseInertia:
      return "sparse-inertia";
    case CountMethod::Dense:
      return "dense";
  }
  return "?";
}

bool is_tridiagonal(const SparseMatrix& m) {
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (std::abs(it.row() - it.col()) > 1 && it.value() != 0.0) return false;
    }
  }
  return true;
}

struct InertiaCounter::Sparse {
  SparseMatrix base;
  std::vector<int> diag_pos;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

InertiaCounter::~InertiaCounter() = default;
InertiaCounter::InertiaCounter(InertiaCounter&&) noexcept = default;
InertiaCounter& InertiaCounter::operator=(InertiaCounter&&) noexcept = default;

InertiaCounter::InertiaCounter(const HamiltonianMatrix& h, CountOptions options)
    : InertiaCounter(h.matrix(), options) {}

InertiaCounter::InertiaCounter(const SparseMatrix& m, CountOptions options) : options_(options) {
  if (m.rows() != m.cols()) throw PreconditionError("count_below needs a square matrix");
  size_ = static_cast<std::size_t>(m.rows());
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(m.rows());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m.rows());
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (it.row() == it.col()) {
        diag[it.row()] += it.value();
      } else {
        rowsum[it.row()] += std::abs(it.value());
      }
    }
  }
  norm_ = size_ ? (diag.cwiseAbs() + rowsum).maxCoeff() : 0.0;
  lower_ = size_ ? (diag - rowsum).minCoeff() : 0.0;

  if (options_.force) {
    method_ = *options_.force;
  } else if (is_tridiagonal(m)) {
    method_ = CountMethod::Sturm;
  } else if (size_ <= options_.dense_threshold) {
    method_ = CountMethod::Dense;
  } else {
    method_ = CountMethod::SparseInertia;
  }
  if (method_ == CountMethod::Sturm && !is_tridiagonal(m)) {
    throw PreconditionError("Sturm counting requires a tridiagonal matrix");
  }

  switch (method_) {
    case CountMethod::Sturm: {
      diag_ = diag;
      off2_ = Eigen::VectorXd::Zero(std::max<Eigen::Index>(0, m.rows() - 1));
      for (int c = 0; c < m.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
          if (it.row() == it.col() + 1) off2_[it.col()] = it.value() * it.value();
        }
      }
      break;
    }
    case CountMethod::Dense:
      dense_ = Eigen::MatrixXd(m);
      break;
    case CountMethod::SparseInertia: {
      sparse_ = std::make_unique<Sparse>();
      SparseMatrix eye(m.rows(), m.cols());
      eye.setIdentity();
      sparse_->base = m + 0.0 * eye;
      sparse_->base.makeCompressed();
      sparse_->diag_pos.assign(size_, -1);
      for (int c = 0; c < sparse_->base.outerSize(); ++c) {
        for (int p = sparse_->base.outerIndexPtr()[c]; p < sparse_->base.outerIndexPtr()[c + 1]; ++p) {
          if (sparse_->base.innerIndexPtr()[p] == c) sparse_->diag_pos[c] = p;
        }
      }
      sparse_->ldlt.analyzePattern(sparse_->base);
      break;
    }
  }
}

std::size_t InertiaCounter::sturm_count(double energy, bool& tiny) const {
  const double tol = options_.pivot_tolerance * std::max(norm_, 1.0);
  const double pivmin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::size_t neg = 0;
  double q = 0.0;
  for (Eigen::Index i = 0; i < diag_.size(); ++i) {
    q = (diag_[i] - energy) - (i > 0 ? off2_[i - 1] / q : 0.0);
    if (std::abs(q) < tol) {
      tiny = true;
      if (std::abs(q) < pivmin) q = -pivmin;
    }
    if (q < 0.0) ++neg;
  }
  return neg;
}

std::size_t InertiaCounter::dense_count(double energy, bool& tiny) const {
  const auto n = static_cast<lapack_int>(size_);
  if (n == 0) return 0;
  Eigen::MatrixXd a = dense_;
  a.diagonal().array() -= energy;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n, ipiv.data());
  if (info < 0) throw Error("dsytrf rejected its arguments");
  if (info > 0) tiny = true;
  const double tol = options_.pivot_tolerance * std::max(norm_, 1.0);
  std::size_t neg = 0;
  for (lapack_int k = 0; k < n;) {
    if (ipiv[static_cast<std::size_t>(k)] > 0 || k + 1 == n) {
      const double d = a(k, k);
      if (std::abs(d) < tol) tiny = true;
      if (d < 0.0) ++neg;
      k += 1;
    } else {
      const double p = a(k, k);
      const double q = a(k + 1, k);
      const double r = a(k + 1, k + 1);
      const double mean = 0.5 * (p + r);
      const double rad = std::hypot(0.5 * (p - r), q);
      const double e1 = mean - rad;
      const double e2 = mean + rad;
      if (std::min(std::abs(e1), std::abs(e2)) < tol) tiny = true;
      neg += static_cast<std::size_t>(e1 < 0.0) + static_cast<std::size_t>(e2 < 0.0);
      k += 2;
    }
  }
  return neg;
}

std::size_t InertiaCounter::sparse_count(double energy, bool& tiny) {
  SparseMatrix shifted = sparse_->base;
  double* values = shifted.valuePtr();
  for (int p : sparse_->diag_pos) values[p] -= energy;
  sparse_->ldlt.factorize(shifted);
  if (sparse_->ldlt.info() != Eigen::Success) {
    tiny = true;
    return 0;
  }
  const double tol = options_.pivot_tolerance * std::max(norm_, 1.0);
  const Eigen::VectorXd d = sparse_->ldlt.vectorD();
  std::size_t neg = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (std::abs(d[i]) < tol) tiny = true;
    if (d[i] < 0.0) ++neg;
  }
  return neg;
}

std::size_t InertiaCounter::raw_count(double energy, bool& tiny) {
  switch (method_) {
    case CountMethod::Sturm:
      return sturm_count(energy, tiny);
    case CountMethod::Dense:
      return dense_count(energy, tiny);
    case CountMethod::SparseInertia:
      return sparse_count(energy, tiny);
  }
  return 0;
}

CountResult InertiaCounter::count(double energy) {
  CountResult result;
  result.method = method_;
  result.energy_used = energy;
  bool tiny = false;
  std::size_t n = raw_count(energy, tiny);
  if (tiny) {
    // Inertia of H - E counts eigenvalues strictly below E; nudging E upward
    // keeps an eigenvalue sitting on the threshold inside the count. A failed
    // sparse factorization (zero pivot without pivoting) gets a few wider nudges.
    double step = options_.shift_scale * std::max(norm_, 1.0);
    for (int attempt = 0;; ++attempt) {
      const double shifted = energy + step;
      bool tiny_again = false;
      n = raw_count(shifted, tiny_again);
      result.shifted = true;
      result.energy_used = shifted;
      const bool failed = method_ == CountMethod::SparseInertia && sparse_->ldlt.info() != Eigen::Success;
      if (!failed) break;
      if (attempt == 8) throw Error("sparse LDL^T failed at every shifted threshold");
      step *= 4.0;
    }
  }
  result.count = n;
  return result;
}

double InertiaCounter::ground_energy(double tolerance) {
  if (size_ == 0) throw PreconditionError("empty matrix has no ground energy");
  return kth_eigenvalue(1, lower_ - 1.0, norm_ + 1.0, tolerance);
}

double InertiaCounter::kth_eigenvalue(std::size_t k, double lo, double hi, double tolerance) {
  if (tolerance <= 0.0) tolerance = 1e-13 * std::max(norm_, 1.0);
  // Invariant: count(lo) < k <= count(hi).
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count(mid).count >= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CountResult count_below(const SparseMatrix& h, double energy, const CountOptions& options) {
  InertiaCounter counter(h, options);
  return counter.count(energy);
}

CountResult count_below(const HamiltonianMatrix& h, double energy, const CountOptions& options) {
  return count_below(h.matrix(), energy, options);
}

}  // namespace decaylab
