#include "decaylab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "decaylab/error.hpp"
#include "decaylab/stats.hpp"

namespace decaylab {

double CubeMasses::total_squared() const {
  double s = 0.0;
  for (double m : mass) s += m * m;
  return s;
}

std::size_t CubeMasses::find(const Site& site) const {
  const auto it = std::lower_bound(sites.begin(), sites.end(), site);
  if (it == sites.end() || *it != site) return sites.size();
  return static_cast<std::size_t>(it - sites.begin());
}

CubeMasses cube_masses(const Eigen::Ref<const Eigen::VectorXd>& vec, const LatticeDomain& domain) {
  if (static_cast<std::size_t>(vec.size()) != domain.size()) {
    throw PreconditionError("cube_masses: vector length does not match the grid");
  }
  const int dim = domain.dim();
  std::map<Site, double> acc;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const double v = vec[static_cast<Eigen::Index>(i)];
    acc[enclosing_site(domain.coordinate(i), dim)] += v * v;
  }
  CubeMasses out;
  out.dim = dim;
  Site lo{0, 0, 0};
  Site hi{0, 0, 0};
  bool first = true;
  for (const auto& [site, sq] : acc) {
    out.sites.push_back(site);
    out.mass.push_back(std::sqrt(sq));
    for (int k = 0; k < dim; ++k) {
      lo[k] = first ? site[k] : std::min(lo[k], site[k]);
      hi[k] = first ? site[k] : std::max(hi[k], site[k]);
    }
    first = false;
  }
  for (const Site& s : out.sites) {
    std::int64_t depth = std::numeric_limits<std::int64_t>::max();
    for (int k = 0; k < dim; ++k) depth = std::min({depth, s[k] - lo[k], hi[k] - s[k]});
    out.depth.push_back(static_cast<int>(depth));
  }
  return out;
}

Site localization_center(const CubeMasses& masses) {
  if (masses.size() == 0) throw PreconditionError("localization_center: no cubes");
  const double top = *std::max_element(masses.mass.begin(), masses.mass.end());
  // Sites are stored in lexicographic order, so the first near-maximal one wins ties.
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses.mass[i] >= top * (1.0 - 1e-12)) return masses.sites[i];
  }
  return masses.sites.front();
}

Site localization_center(const Eigen::Ref<const Eigen::VectorXd>& vec, const LatticeDomain& domain) {
  return localization_center(cube_masses(vec, domain));
}

double site_distance(const Site& a, const Site& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = static_cast<double>(a[k] - b[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

DecayFit decay_mass_fit(std::span<const double> distance, std::span<const double> mass) {
  DecayFit fit;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < distance.size(); ++i) {
    if (mass[i] > 0.0 && std::isfinite(mass[i])) {
      x.push_back(distance[i]);
      y.push_back(std::log(mass[i]));
    } else {
      ++fit.excluded;
    }
  }
  fit.points = x.size();
  const bool spread = !x.empty() && *std::max_element(x.begin(), x.end()) > *std::min_element(x.begin(), x.end());
  if (fit.points < kMinFitPoints || !spread) {
    fit.refused = true;
    fit.note = "fewer than 5 usable cubes in the fit window";
    return fit;
  }
  const LinearFit lf = linear_fit(x, y);
  fit.mass = -lf.slope;
  fit.prefactor = std::exp(lf.intercept);
  fit.residual = lf.residual;
  fit.localized = fit.mass > kLocalizedMassThreshold;
  return fit;
}

DecayFit decay_mass_fit(const CubeMasses& masses, const Site& center, const FitWindow& window) {
  double top = 0.0;
  for (double m : masses.mass) top = std::max(top, m);
  const double floor = window.relative_floor * top;
  std::vector<double> dist;
  std::vector<double> mass;
  std::size_t below = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double r = site_distance(masses.sites[i], center, masses.dim);
    if (r < window.inner_radius || masses.depth[i] < window.outer_layers) continue;
    if (!(masses.mass[i] > floor)) {
      ++below;
      continue;
    }
    dist.push_back(r);
    mass.push_back(masses.mass[i]);
  }
  DecayFit fit = decay_mass_fit(dist, mass);
  fit.excluded += below;
  return fit;
}

SuleCheck sule_check(const CubeMasses& masses, const Site& center, const DecayFit& fit, double eps, double slack,
                     double relative_floor) {
  SuleCheck out;
  double top = 0.0;
  for (double m : masses.mass) top = std::max(top, m);
  const double floor = relative_floor * top;
  Site origin{0, 0, 0};
  const double drift = std::exp(std::pow(site_distance(center, origin, masses.dim), eps));
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses.mass[i] > floor)) {
      ++out.below_floor;
      continue;
    }
    const double r = site_distance(masses.sites[i], center, masses.dim);
    const double bound = fit.prefactor * drift * std::exp(-slack * fit.mass * r);
    const double ratio = bound > 0.0 ? masses.mass[i] / bound : std::numeric_limits<double>::infinity();
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    ++out.checked;
    if (ratio > 1.0 + 1e-12) ++out.violations;
  }
  return out;
}

RadiusPrediction center_radius_prediction(double alpha, double coupling, double u0, double energy,
                                          const RadiusConfig& config) {
  if (!(energy < 0.0)) throw PreconditionError("center_radius_prediction needs E < 0");
  if (!(alpha >= 0.0)) throw PreconditionError("center_radius_prediction needs alpha >= 0");
  RadiusPrediction p;
  const double ratio = 2.0 * coupling * u0 / std::abs(energy);
  const bool below = std::abs(energy) < 2.0 * coupling * u0;
  if (alpha == 0.0) {
    p.scale = below ? std::numeric_limits<double>::infinity() : 1.0;
  } else {
    p.scale = std::max(1.0, std::pow(ratio, 1.0 / alpha));
  }
  p.branch = (below && alpha <= 1.0) ? 1 : 2;
  if (p.branch == 1) {
    p.radius = config.power_branch_constant * p.scale;
  } else {
    p.radius = std::max(1.0, config.inverse_branch_constant / std::abs(energy)) * p.scale;
  }
  return p;
}

}  // namespace decaylab
