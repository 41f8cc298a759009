#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/hamiltonian.hpp"

namespace decaylab {

enum class CountMethod { Sturm, SparseInertia, Dense };

std::string to_string(CountMethod m);

struct CountOptions {
  /// Forces a factorization path; by default tridiagonal matrices use Sturm
  /// sequences, small ones the dense factorization and the rest sparse LDL^T.
  std::optional<CountMethod> force;
  std::size_t dense_threshold = 400;
  /// |pivot| below pivot_tolerance * ||H|| marks E as numerically an eigenvalue.
  double pivot_tolerance = 1e-14;
  /// Retry shift, relative to ||H||.
  double shift_scale = 1e-10;
};

struct CountResult {
  std::size_t count = 0;
  CountMethod method = CountMethod::Sturm;
  /// The threshold sat on a tiny pivot and the count was taken at E + shift.
  bool shifted = false;
  double energy_used = 0.0;
};

/// Eigenvalue counting n(H, E) = #{eigenvalues <= E} by Sylvester inertia.
///
/// Holds the symbolic analysis so that repeated thresholds on one matrix
/// (bisection, energy grids) only pay for the numeric factorization. Not
/// thread-safe; use one counter per thread.
class InertiaCounter {
 public:
  explicit InertiaCounter(const SparseMatrix& matrix, CountOptions options = {});
  explicit InertiaCounter(const HamiltonianMatrix& h, CountOptions options = {});
  ~InertiaCounter();
  InertiaCounter(InertiaCounter&&) noexcept;
  InertiaCounter& operator=(InertiaCounter&&) noexcept;

  CountResult count(double energy);

  std::size_t size() const { return size_; }
  CountMethod method() const { return method_; }
  double norm_bound() const { return norm_; }
  /// Gershgorin lower bound on the spectrum.
  double lower_bound() const { return lower_; }
  /// Smallest eigenvalue by bisection on counts, to `tolerance` (default 1e-13 ||H||).
  double ground_energy(double tolerance = -1.0);
  /// k-th smallest eigenvalue (k >= 1) by bisection in [lo, hi].
  double kth_eigenvalue(std::size_t k, double lo, double hi, double tolerance = -1.0);

 private:
  struct Sparse;

  // Inertia of H - E; `tiny` reports a pivot below tolerance.
  std::size_t raw_count(double energy, bool& tiny);
  std::size_t sturm_count(double energy, bool& tiny) const;
  std::size_t dense_count(double energy, bool& tiny) const;
  std::size_t sparse_count(double energy, bool& tiny);

  CountOptions options_;
  CountMethod method_ = CountMethod::Sturm;
  std::size_t size_ = 0;
  double norm_ = 0.0;
  double lower_ = 0.0;
  Eigen::VectorXd diag_;
  Eigen::VectorXd off2_;
  Eigen::MatrixXd dense_;
  std::unique_ptr<Sparse> sparse_;
};

CountResult count_below(const SparseMatrix& h, double energy, const CountOptions& options = {});
CountResult count_below(const HamiltonianMatrix& h, double energy, const CountOptions& options = {});

/// Whether every stored entry lies on the main or first off-diagonals.
bool is_tridiagonal(const SparseMatrix& m);

/// Eigenpair request: a window ]lower, upper], or the lowest `cap` eigenpairs
/// not exceeding `threshold`.
struct EigenRequest {
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<std::size_t> cap;
  double threshold = 0.0;
  int max_restarts = 4;
  /// Window slices handed to one shift-invert Lanczos run.
  std::size_t slice_size = 12;
};

struct SpectralSummary {
  double threshold = 0.0;
  double window_lower = 0.0;
  /// n(H, threshold).
  std::size_t count = 0;
  /// Number of eigenvalues in the requested window/cap (what completeness means).
  std::size_t expected = 0;
  double ground_energy = 0.0;
  std::vector<double> energies;
  Eigen::MatrixXd vectors;
  std::vector<double> residuals;
  CountMethod method = CountMethod::Sturm;
  std::string solver;
  bool complete = true;
  bool count_shifted = false;

  double max_residual() const;
  /// max |V^T V - I|.
  double orthogonality_error() const;
};

SpectralSummary lowest_eigenpairs(const SparseMatrix& h, const EigenRequest& request,
                                  const CountOptions& options = {});
SpectralSummary lowest_eigenpairs(const HamiltonianMatrix& h, const EigenRequest& request,
                                  const CountOptions& options = {});

/// min |E_j - E| over eigenvalues in [E - r, E + r], +infinity when none.
double spectrum_distance(const SparseMatrix& h, double energy, double radius, const CountOptions& options = {});
double spectrum_distance(const HamiltonianMatrix& h, double energy, double radius,
                         const CountOptions& options = {});
double spectrum_distance(InertiaCounter& counter, double energy, double radius);

}  // namespace decaylab
