#include "decaylab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "decaylab/error.hpp"
#include "decaylab/rng.hpp"

namespace decaylab {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint32_t stream) {
  const auto out = Philox4x32::generate(
      {static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32), stream, 0x5eedu},
      Philox4x32::key_from_seed(master));
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const auto out = Philox4x32::generate({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                                         static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)},
                                        Philox4x32::key_from_seed(seed ^ 0x9e3779b97f4a7c15ull));
  return Philox4x32::to_unit(out[0], out[1]);
}

Distribution Distribution::uniform01() { return Distribution{}; }

Distribution Distribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("Bernoulli parameter must lie in [0, 1]");
  Distribution d;
  d.kind_ = Kind::Bernoulli;
  d.p_ = p;
  return d;
}

Distribution Distribution::bounded_density(std::vector<double> bins) {
  if (bins.empty()) throw PreconditionError("density table must be non-empty");
  double total = 0.0;
  for (double b : bins) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw PreconditionError("density table entries must be finite and >= 0");
    total += b;
  }
  if (!(total > 0.0)) throw PreconditionError("density table must have positive mass");
  Distribution d;
  d.kind_ = Kind::BoundedDensity;
  const double width = 1.0 / static_cast<double>(bins.size());
  for (double& b : bins) b /= total * width;
  d.cdf_.resize(bins.size() + 1, 0.0);
  for (std::size_t i = 0; i < bins.size(); ++i) d.cdf_[i + 1] = d.cdf_[i] + bins[i] * width;
  d.cdf_.back() = 1.0;
  d.bins_ = std::move(bins);
  return d;
}

double Distribution::mean() const {
  switch (kind_) {
    case Kind::Uniform01:
      return 0.5;
    case Kind::Bernoulli:
      return p_;
    case Kind::BoundedDensity: {
      const double w = 1.0 / static_cast<double>(bins_.size());
      double m = 0.0;
      for (std::size_t i = 0; i < bins_.size(); ++i) m += bins_[i] * w * (static_cast<double>(i) + 0.5) * w;
      return m;
    }
  }
  return 0.0;
}

std::optional<double> Distribution::density_sup() const {
  switch (kind_) {
    case Kind::Uniform01:
      return 1.0;
    case Kind::Bernoulli:
      return std::nullopt;
    case Kind::BoundedDensity:
      return *std::max_element(bins_.begin(), bins_.end());
  }
  return std::nullopt;
}

double Distribution::transform(double u) const {
  switch (kind_) {
    case Kind::Uniform01:
      return u;
    case Kind::Bernoulli:
      return u < p_ ? 1.0 : 0.0;
    case Kind::BoundedDensity: {
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      std::size_t bin = static_cast<std::size_t>(std::distance(cdf_.begin(), it)) - 1;
      bin = std::min(bin, bins_.size() - 1);
      while (bins_[bin] == 0.0 && bin + 1 < bins_.size()) ++bin;
      const double w = 1.0 / static_cast<double>(bins_.size());
      const double inside = (u - cdf_[bin]) / (bins_[bin] * w);
      return std::clamp((static_cast<double>(bin) + inside) * w, 0.0, 1.0);
    }
  }
  return u;
}

std::string Distribution::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Uniform01:
      return "uniform";
    case Kind::Bernoulli:
      os << "bernoulli(" << p_ << ")";
      return os.str();
    case Kind::BoundedDensity:
      os << "density(" << bins_.size() << " bins)";
      return os.str();
  }
  return "?";
}

double sample_site(const DisorderSpec& spec, const Site& site) {
  const auto out = Philox4x32::generate(
      {static_cast<std::uint32_t>(site[0]), static_cast<std::uint32_t>(site[1]),
       static_cast<std::uint32_t>(site[2]), spec.realization},
      Philox4x32::key_from_seed(spec.seed));
  return spec.distribution.transform(Philox4x32::to_unit(out[0], out[1]));
}

std::size_t SiteBox::size() const {
  std::size_t n = 1;
  for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(shape[k]);
  return n;
}

bool SiteBox::contains(const Site& s) const {
  for (int k = 0; k < dim; ++k) {
    if (s[k] < lo[k] || s[k] >= lo[k] + shape[k]) return false;
  }
  return true;
}

std::size_t SiteBox::offset(const Site& s) const {
  std::size_t idx = 0;
  for (int k = dim - 1; k >= 0; --k) idx = idx * static_cast<std::size_t>(shape[k]) + static_cast<std::size_t>(s[k] - lo[k]);
  return idx;
}

Site SiteBox::site(std::size_t off) const {
  Site s{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    s[k] = lo[k] + static_cast<std::int64_t>(off % static_cast<std::size_t>(shape[k]));
    off /= static_cast<std::size_t>(shape[k]);
  }
  return s;
}

SiteBox sites_covering(const LatticeDomain& domain) {
  SiteBox box;
  box.dim = domain.dim();
  const LatticeDomain::Node first{0, 0, 0};
  const LatticeDomain::Node last{domain.shape()[0] - 1, domain.shape()[1] - 1, domain.shape()[2] - 1};
  const Site a = enclosing_site(domain.coordinate(first), domain.dim());
  const Site b = enclosing_site(domain.coordinate(last), domain.dim());
  for (int k = 0; k < domain.dim(); ++k) {
    box.lo[k] = a[k];
    box.shape[k] = b[k] - a[k] + 1;
  }
  return box;
}

DisorderField::DisorderField(DisorderSpec spec, SiteBox box, std::vector<double> values)
    : spec_(std::move(spec)), box_(box), values_(std::move(values)) {
  if (values_.size() != box_.size()) throw PreconditionError("disorder field size does not match its site block");
}

double DisorderField::at(const Site& s) const {
  if (!box_.contains(s)) {
    std::ostringstream os;
    os << "disorder field does not cover site (";
    for (int k = 0; k < box_.dim; ++k) os << (k ? ", " : "") << s[k];
    os << ")";
    throw PreconditionError(os.str());
  }
  return values_[box_.offset(s)];
}

DisorderField DisorderField::filled(double value) const {
  return DisorderField(spec_, box_, std::vector<double>(values_.size(), value));
}

DisorderField sample_disorder(const DisorderSpec& spec, const SiteBox& sites) {
  std::vector<double> values(sites.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = sample_site(spec, sites.site(i));
  return DisorderField(spec, sites, std::move(values));
}

}  // namespace decaylab
