#include <algorithm>
#include <cmath>

#include "decaylab/error.hpp"
#include "decaylab/experiments.hpp"

namespace decaylab {

LocalizeRealization localize_realization(const LocalizeConfig& config, double alpha, std::uint64_t seed,
                                         std::uint32_t realization) {
  if (!(config.window_fraction > 0.0 && config.window_fraction <= 1.0)) {
    throw PreconditionError("window fraction must lie in ]0, 1]");
  }
  ModelSpec model = config.model;
  model.envelope = Envelope::power_law(alpha);
  const double mesh = config.mesh > 0.0 ? config.mesh : default_mesh(model.dim);
  const LatticeDomain box = build_domain(model.dim, config.side, mesh, Boundary::Dirichlet);
  const auto h = embedded_operator(model, box, config.buffer, ImpurityRule::RestrictToBox, seed, realization);

  LocalizeRealization out;
  out.alpha = alpha;
  out.realization = realization;
  InertiaCounter counter(h, config.counting);
  out.ground_energy = counter.ground_energy();
  if (!(out.ground_energy < 0.0)) {
    out.window_lower = out.window_upper = out.ground_energy;
    return out;
  }
  const double emin = out.ground_energy;
  EigenRequest req;
  req.lower = emin - 1e-8 * std::max(1.0, std::abs(emin));
  req.upper = (1.0 - config.window_fraction) * emin;
  const SpectralSummary summary = lowest_eigenpairs(h, req, config.counting);
  out.window_lower = *req.lower;
  out.window_upper = *req.upper;
  out.complete = summary.complete;

  const LatticeDomain& grid = h.domain();
  const double u0 = model.single_site.sup();
  for (std::size_t n = 0; n < summary.energies.size(); ++n) {
    const CubeMasses masses = cube_masses(summary.vectors.col(static_cast<Eigen::Index>(n)), grid);
    EigenProfile p;
    p.energy = summary.energies[n];
    p.center = localization_center(masses);
    p.center_norm = site_distance(p.center, Site{0, 0, 0}, model.dim);
    p.partition_error = std::abs(masses.total_squared() - 1.0);
    p.fit = decay_mass_fit(masses, p.center, config.fit);
    if (!p.fit.refused) {
      p.sule = sule_check(masses, p.center, p.fit, config.sule_eps, config.sule_slack, config.fit.relative_floor);
    }
    p.predicted_radius = center_radius_prediction(alpha, model.coupling, u0, p.energy, config.radius).radius;
    p.within_radius = p.center_norm <= config.radius_safety * p.predicted_radius;
    out.profiles.push_back(p);
  }
  if (!config.times.empty() && summary.complete) {
    out.dynamics = dynamics_moment(summary, grid, config.moment_order, config.times, config.fit);
  }
  if (config.keep_vectors) out.vectors = summary.vectors;
  return out;
}

}  // namespace decaylab
