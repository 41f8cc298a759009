#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "decaylab/error.hpp"
#include "decaylab/spectral.hpp"
#include "eigensolve.hpp"

namespace decaylab {

double SpectralSummary::max_residual() const {
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, r);
  return worst;
}

double SpectralSummary::orthogonality_error() const {
  if (vectors.cols() == 0) return 0.0;
  const Eigen::MatrixXd gram = vectors.transpose() * vectors;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

namespace {

struct SliceJob {
  double lo;
  double hi;
  std::size_t expected;
};

void plan_slices(InertiaCounter& counter, double lo, double hi, std::size_t nlo, std::size_t nhi,
                 std::size_t slice_size, int depth, std::vector<SliceJob>& jobs) {
  if (nhi <= nlo) return;
  const std::size_t inside = nhi - nlo;
  const double width_floor = 1e-9 * std::max(1.0, counter.norm_bound());
  if (inside <= slice_size || depth > 48 || hi - lo < width_floor) {
    jobs.push_back({lo, hi, inside});
    return;
  }
  const double mid = 0.5 * (lo + hi);
  const std::size_t nmid = counter.count(mid).count;
  plan_slices(counter, lo, mid, nlo, nmid, slice_size, depth + 1, jobs);
  plan_slices(counter, mid, hi, nmid, nhi, slice_size, depth + 1, jobs);
}

detail::EigenBlock select_window(const detail::EigenBlock& all, double lo, double hi, std::size_t cap) {
  detail::EigenBlock out;
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < all.energies.size(); ++i) {
    if (all.energies[i] > lo && all.energies[i] <= hi && keep.size() < cap) {
      keep.push_back(static_cast<Eigen::Index>(i));
    }
  }
  out.vectors.resize(all.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.energies.push_back(all.energies[static_cast<std::size_t>(keep[k])]);
    out.vectors.col(static_cast<Eigen::Index>(k)) = all.vectors.col(keep[k]);
  }
  return out;
}

}  // namespace

SpectralSummary lowest_eigenpairs(const SparseMatrix& h, const EigenRequest& request, const CountOptions& options) {
  if (request.cap && *request.cap == 0) throw PreconditionError("eigenpair cap must be at least 1");
  InertiaCounter counter(h, options);
  SpectralSummary summary;
  summary.method = counter.method();

  const double lo = request.lower.value_or(counter.lower_bound() - 1.0);
  const double hi = request.upper.value_or(request.threshold);
  if (!(lo < hi)) throw PreconditionError("eigenpair window must satisfy lower < upper");
  const CountResult chi = counter.count(hi);
  const CountResult clo = counter.count(lo);
  summary.threshold = hi;
  summary.window_lower = lo;
  summary.count = chi.count;
  summary.count_shifted = chi.shifted || clo.shifted;

  const std::size_t in_window = chi.count >= clo.count ? chi.count - clo.count : 0;
  const std::size_t cap = request.cap.value_or(std::numeric_limits<std::size_t>::max());
  summary.expected = std::min(in_window, cap);
  const double tolerance = 1e-10 * std::max(1.0, counter.norm_bound());

  detail::EigenBlock block;
  switch (counter.method()) {
    case CountMethod::Dense: {
      summary.solver = "dense";
      const detail::EigenBlock all = detail::dense_pairs(h);
      if (!all.energies.empty()) summary.ground_energy = all.energies.front();
      block = select_window(all, lo, hi, cap);
      break;
    }
    case CountMethod::Sturm: {
      summary.solver = "tridiagonal";
      if (h.rows() > 0) summary.ground_energy = detail::tridiagonal_pairs(h, 1, 1).energies.at(0);
      const detail::EigenBlock raw =
          detail::tridiagonal_pairs(h, clo.count + 1, clo.count + summary.expected);
      block = select_window(raw, lo, hi, cap);
      break;
    }
    case CountMethod::SparseInertia: {
      summary.solver = "lanczos";
      double top = hi;
      std::size_t ntop = chi.count;
      if (summary.expected < in_window) {
        // Cap is binding: shrink the window to end just above the cap-th eigenvalue.
        const std::size_t k = clo.count + summary.expected;
        const double ek = counter.kth_eigenvalue(k, lo, hi);
        top = std::min(hi, ek + 1e-12 * std::max(1.0, counter.norm_bound()));
        ntop = counter.count(top).count;
      }
      std::vector<SliceJob> jobs;
      plan_slices(counter, lo, top, clo.count, ntop, std::max<std::size_t>(request.slice_size, 1), 0, jobs);
      Eigen::MatrixXd collected(h.rows(), 0);
      for (const SliceJob& job : jobs) {
        const detail::EigenBlock part =
            detail::lanczos_slice(h, job.lo, job.hi, job.expected, tolerance, request.max_restarts);
        Eigen::MatrixXd grown(h.rows(), collected.cols() + part.vectors.cols());
        grown << collected, part.vectors;
        collected.swap(grown);
      }
      const detail::EigenBlock refined = detail::rayleigh_ritz(h, collected);
      block = select_window(refined, lo, hi, cap);
      if (clo.count == 0 && !block.energies.empty()) {
        summary.ground_energy = block.energies.front();
      } else if (h.rows() > 0) {
        summary.ground_energy = counter.ground_energy();
      }
      break;
    }
  }

  summary.energies = std::move(block.energies);
  summary.vectors = std::move(block.vectors);
  summary.residuals.reserve(summary.energies.size());
  for (std::size_t i = 0; i < summary.energies.size(); ++i) {
    const auto col = summary.vectors.col(static_cast<Eigen::Index>(i));
    summary.residuals.push_back((h * col - summary.energies[i] * col).norm());
  }
  const double residual_limit = 1e-8 * std::max(1.0, counter.norm_bound());
  summary.complete = summary.energies.size() == summary.expected && summary.max_residual() <= residual_limit &&
                     summary.orthogonality_error() <= 1e-8;
  return summary;
}

SpectralSummary lowest_eigenpairs(const HamiltonianMatrix& h, const EigenRequest& request,
                                  const CountOptions& options) {
  return lowest_eigenpairs(h.matrix(), request, options);
}

double spectrum_distance(InertiaCounter& counter, double energy, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("spectrum_distance needs a positive search radius");
  const auto inside = [&](double r) { return counter.count(energy + r).count > counter.count(energy - r).count; };
  if (!inside(radius)) return std::numeric_limits<double>::infinity();
  const double tol = 1e-13 * std::max(1.0, counter.norm_bound());
  double lo = 0.0;
  double hi = radius;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (inside(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double spectrum_distance(const SparseMatrix& h, double energy, double radius, const CountOptions& options) {
  InertiaCounter counter(h, options);
  return spectrum_distance(counter, energy, radius);
}

double spectrum_distance(const HamiltonianMatrix& h, double energy, double radius, const CountOptions& options) {
  return spectrum_distance(h.matrix(), energy, radius, options);
}

}  // namespace decaylab
