#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace decaylab {

struct SampleStats {
  double mean = 0.0;
  /// Standard error of the mean (sample standard deviation / sqrt(n)).
  double stderr_mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

/// Summation runs in index order so results do not depend on scheduling.
SampleStats sample_stats(std::span<const double> values);

double median(std::vector<double> values);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_se = 0.0;
  double slope_se = 0.0;
  /// Root-mean-square residual of the (weighted) fit.
  double residual = 0.0;
  std::size_t points = 0;
};

/// Least squares y ~ intercept + slope x; weights default to 1.
/// Throws PreconditionError with fewer than two distinct abscissae.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> weights = {});

}  // namespace decaylab
