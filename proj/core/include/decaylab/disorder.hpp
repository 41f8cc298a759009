#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/lattice.hpp"

namespace decaylab {

/// Single-site law of the couplings omega_j, supported in [0, 1].
class Distribution {
 public:
  enum class Kind { Uniform01, Bernoulli, BoundedDensity };

  static Distribution uniform01();
  static Distribution bernoulli(double p);
  /// Piecewise-constant density on equal bins of [0, 1]; normalized on construction.
  static Distribution bounded_density(std::vector<double> bins);

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::vector<double>& bins() const { return bins_; }

  double mean() const;
  /// ||h||_inf, or nullopt when the law has no Lebesgue density (Bernoulli).
  std::optional<double> density_sup() const;
  /// Inverse CDF applied to a uniform variate in [0, 1).
  double transform(double uniform) const;
  std::string name() const;

  bool operator==(const Distribution&) const = default;

 private:
  Kind kind_ = Kind::Uniform01;
  double p_ = 0.5;
  std::vector<double> bins_;
  std::vector<double> cdf_;
};

struct DisorderSpec {
  Distribution distribution = Distribution::uniform01();
  std::uint64_t seed = 0;
  std::uint32_t realization = 0;
};

/// omega_j for one site; a pure function of (seed, realization, j).
double sample_site(const DisorderSpec& spec, const Site& site);

/// Rectangular block of impurity sites lo[k] .. lo[k] + shape[k] - 1.
struct SiteBox {
  int dim = 1;
  Site lo{0, 0, 0};
  std::array<std::int64_t, kMaxDim> shape{0, 1, 1};

  std::size_t size() const;
  bool contains(const Site& s) const;
  std::size_t offset(const Site& s) const;
  Site site(std::size_t offset) const;
};

/// Sites whose unit cubes meet the grid of `domain`.
SiteBox sites_covering(const LatticeDomain& domain);

/// One realization {omega_j} on a block of sites.
class DisorderField {
 public:
  DisorderField() = default;
  DisorderField(DisorderSpec spec, SiteBox box, std::vector<double> values);

  const DisorderSpec& spec() const { return spec_; }
  const SiteBox& box() const { return box_; }
  const std::vector<double>& values() const { return values_; }

  bool covers(const Site& s) const { return box_.contains(s); }
  /// Throws PreconditionError for a site outside the sampled block.
  double at(const Site& s) const;

  /// Same sites with every omega replaced by `value`; used for reference operators.
  DisorderField filled(double value) const;

 private:
  DisorderSpec spec_;
  SiteBox box_;
  std::vector<double> values_;
};

DisorderField sample_disorder(const DisorderSpec& spec, const SiteBox& sites);

}  // namespace decaylab
