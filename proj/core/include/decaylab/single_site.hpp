#pragma once

#include <vector>

#include "decaylab/lattice.hpp"

namespace decaylab {

/// Bump u attached to every impurity site, supported inside the open unit cube.
class SingleSitePotential {
 public:
  /// u = u0 * indicator of the cube of side delta, 0 < delta <= 1.
  static SingleSitePotential cube(double u0, double delta = 1.0);
  /// Piecewise-constant table on a resolution^d sub-grid of [-1/2, 1/2)^d,
  /// axis 0 fastest.
  static SingleSitePotential tabulated(int dim, int resolution, std::vector<double> samples);

  /// u(offset) for offset = x - j in [-1/2, 1/2)^d.
  double value(const Point& offset, int dim) const;

  /// Pointwise bound u0.
  double sup() const { return u0_; }
  /// v = integral of u.
  double integral(int dim) const;
  /// U0 = sup_x sum_j u(x - j); supports lie in disjoint unit cubes, so U0 = sup u.
  double periodized_sup() const { return u0_; }

  bool is_cube() const { return samples_.empty(); }
  double delta() const { return delta_; }
  int resolution() const { return resolution_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  double u0_ = 1.0;
  double delta_ = 1.0;
  int dim_ = 0;
  int resolution_ = 0;
  std::vector<double> samples_;
};

}  // namespace decaylab
