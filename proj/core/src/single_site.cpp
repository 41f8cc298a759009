#include "decaylab/single_site.hpp"

#include <algorithm>
#include <cmath>

#include "decaylab/error.hpp"

namespace decaylab {

SingleSitePotential SingleSitePotential::cube(double u0, double delta) {
  if (!(u0 > 0.0)) throw PreconditionError("single-site height u0 must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("single-site support delta must lie in ]0, 1]");
  SingleSitePotential u;
  u.u0_ = u0;
  u.delta_ = delta;
  return u;
}

SingleSitePotential SingleSitePotential::tabulated(int dim, int resolution, std::vector<double> samples) {
  if (dim < 1 || dim > kMaxDim || resolution < 1) throw PreconditionError("bad tabulated single-site grid");
  std::size_t expected = 1;
  for (int k = 0; k < dim; ++k) expected *= static_cast<std::size_t>(resolution);
  if (samples.size() != expected) throw PreconditionError("tabulated single-site needs resolution^d samples");
  double sup = 0.0;
  double sum = 0.0;
  for (double s : samples) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw PreconditionError("single-site samples must be finite and >= 0");
    sup = std::max(sup, s);
    sum += s;
  }
  if (!(sum > 0.0)) throw PreconditionError("single-site potential must have positive integral");
  SingleSitePotential u;
  u.u0_ = sup;
  u.dim_ = dim;
  u.resolution_ = resolution;
  u.samples_ = std::move(samples);
  return u;
}

double SingleSitePotential::value(const Point& offset, int dim) const {
  if (samples_.empty()) {
    for (int k = 0; k < dim; ++k) {
      if (std::abs(offset[k]) >= delta_ / 2) return 0.0;
    }
    return u0_;
  }
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int k = 0; k < dim; ++k) {
    if (offset[k] < -0.5 || offset[k] >= 0.5) return 0.0;
    auto cell = static_cast<std::int64_t>(std::floor((offset[k] + 0.5) * resolution_));
    cell = std::clamp<std::int64_t>(cell, 0, resolution_ - 1);
    idx += static_cast<std::size_t>(cell) * stride;
    stride *= static_cast<std::size_t>(resolution_);
  }
  return samples_[idx];
}

double SingleSitePotential::integral(int dim) const {
  if (samples_.empty()) return u0_ * std::pow(delta_, dim);
  double sum = 0.0;
  for (double s : samples_) sum += s;
  return sum * std::pow(1.0 / resolution_, dim_);
}

}  // namespace decaylab
