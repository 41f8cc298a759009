#include <algorithm>
#include <cmath>
#include <limits>

#include "decaylab/error.hpp"
#include "decaylab/experiments.hpp"
#include "decaylab/parallel.hpp"
#include "decaylab/rng.hpp"
#include "decaylab/stats.hpp"

namespace decaylab {

double far_region_radius(const ModelSpec& model, double reference_energy) {
  const double ratio = 2.0 * model.coupling * model.single_site.sup() / std::abs(reference_energy);
  const double alpha = model.envelope.is_power_law() ? model.envelope.alpha() : 0.0;
  if (alpha == 0.0) return ratio <= 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(ratio, 1.0 / alpha);
}

bool satisfies_far_region(const ModelSpec& model, double reference_energy, const Cube& box) {
  return box.min_japanese_bracket() >= far_region_radius(model, reference_energy);
}

std::vector<WegnerCenter> default_wegner_centers(const ModelSpec& model, double reference_energy, double side) {
  std::vector<WegnerCenter> centers;
  centers.push_back({"origin", Point{0, 0, 0}});
  const double radius = far_region_radius(model, reference_energy);
  if (std::isfinite(radius)) {
    const double far = std::ceil(side / 2 + std::sqrt(std::max(radius * radius - 1.0, 0.0)));
    centers.push_back({"mid", Point{std::round(far / 2), 0, 0}});
    centers.push_back({"far", Point{far, 0, 0}});
  } else {
    centers.push_back({"mid", Point{side, 0, 0}});
  }
  return centers;
}

void validate_wegner(const WegnerConfig& config) {
  if (config.model.distribution.kind() == Distribution::Kind::Bernoulli) {
    throw PreconditionError(
        "the Wegner scan needs a single-site law with a bounded density; Bernoulli disorder is refused");
  }
  if (!(config.reference_energy < 0.0)) throw PreconditionError("Wegner scan needs E' < 0");
  if (!(config.energy <= config.reference_energy)) throw PreconditionError("Wegner scan needs E <= E'");
  const double cap = std::abs(config.reference_energy) / 4.0;
  for (double eta : config.etas) {
    if (!(eta > 0.0)) throw PreconditionError("Wegner eta values must be positive");
    if (eta > cap) {
      throw PreconditionError("Wegner eta = " + std::to_string(eta) + " exceeds |E'|/4 = " + std::to_string(cap));
    }
  }
  if (config.etas.empty()) throw PreconditionError("Wegner scan needs at least one eta");
}

WegnerSample wegner_sample(const WegnerConfig& config, const WegnerCenter& center, double eta, bool far,
                           std::uint64_t seed, std::uint32_t realization) {
  const double mesh = config.mesh > 0.0 ? config.mesh : default_mesh(config.model.dim);
  const std::span<const double> c(center.center.data(), static_cast<std::size_t>(config.model.dim));
  const LatticeDomain box = build_domain(config.model.dim, c, config.side, mesh, Boundary::Dirichlet);
  const auto h = embedded_operator(config.model, box, config.buffer, ImpurityRule::RestrictToBox, seed, realization);
  InertiaCounter counter(h, config.counting);
  WegnerSample s;
  const std::size_t above = counter.count(config.energy + eta).count;
  const std::size_t below = counter.count(config.energy - eta).count;
  s.trace = above >= below ? above - below : 0;
  s.hit = s.trace > 0;
  if (far) {
    s.ground_ok = counter.count(config.reference_energy / 2.0).count == 0;
    s.ground = counter.ground_energy();
  }
  return s;
}

namespace {

std::size_t central_index(const std::vector<WegnerCenter>& centers) {
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (centers[i].label == "origin") return i;
  }
  return 0;
}

WegnerFit fit_loglog(const std::vector<WegnerCell>& cells, double side, int dim, bool trace) {
  std::vector<double> x, y, w;
  for (const WegnerCell& c : cells) {
    const double v = trace ? c.trace_mean : c.probability;
    if (!(v > 0.0)) continue;
    x.push_back(std::log(c.eta));
    y.push_back(std::log(v));
    if (trace) {
      const double rel = c.trace_stderr / v;
      w.push_back(1.0 / std::max(rel * rel, 1e-8));
    }
  }
  WegnerFit fit;
  fit.points = x.size();
  if (x.size() < 2) return fit;
  const LinearFit lf = linear_fit(x, y, w);
  fit.exponent = lf.slope;
  fit.exponent_se = lf.slope_se;
  const double volume = std::pow(side, dim);
  for (const WegnerCell& c : cells) {
    const double v = trace ? c.trace_mean : c.probability;
    if (v > 0.0) fit.constant = std::max(fit.constant, v / (std::pow(c.eta, fit.exponent) * volume));
  }
  return fit;
}

}  // namespace

WegnerFit fit_wegner_trace(const std::vector<WegnerCell>& cells, double side, int dim) {
  return fit_loglog(cells, side, dim, true);
}

WegnerFit fit_wegner_probability(const std::vector<WegnerCell>& cells, double side, int dim) {
  return fit_loglog(cells, side, dim, false);
}

WegnerScanRecord wegner_scan(const WegnerConfig& config) {
  validate_wegner(config);
  WegnerScanRecord rec;
  rec.centers = config.centers.empty() ? default_wegner_centers(config.model, config.reference_energy, config.side)
                                       : config.centers;
  for (std::size_t ci = 0; ci < rec.centers.size(); ++ci) {
    const std::span<const double> c(rec.centers[ci].center.data(), static_cast<std::size_t>(config.model.dim));
    const Cube cube = build_domain(config.model.dim, c, config.side, 1.0, Boundary::Dirichlet).cube();
    const bool far = satisfies_far_region(config.model, config.reference_energy, cube);
    for (std::size_t ei = 0; ei < config.etas.size(); ++ei) {
      WegnerCell cell;
      cell.center_index = ci;
      cell.center_class = rec.centers[ci].label;
      cell.center = rec.centers[ci].center;
      cell.far = far;
      cell.eta = config.etas[ei];
      cell.seed = derive_seed(config.seed, rec.cells.size());
      rec.cells.push_back(cell);
    }
  }

  const std::size_t per = config.realizations;
  std::vector<WegnerSample> samples(rec.cells.size() * per);
  parallel_for(samples.size(), config.threads, [&](std::size_t k) {
    const WegnerCell& cell = rec.cells[k / per];
    samples[k] = wegner_sample(config, rec.centers[cell.center_index], cell.eta, cell.far, cell.seed,
                               static_cast<std::uint32_t>(k % per));
  });

  for (std::size_t i = 0; i < rec.cells.size(); ++i) {
    WegnerCell& cell = rec.cells[i];
    std::vector<double> traces;
    cell.far_min_ground = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < per; ++r) {
      const WegnerSample& s = samples[i * per + r];
      traces.push_back(static_cast<double>(s.trace));
      cell.hits += s.hit ? 1 : 0;
      if (cell.far) {
        cell.far_ground_ok = cell.far_ground_ok && s.ground_ok;
        cell.far_min_ground = std::min(cell.far_min_ground, s.ground);
      }
    }
    const SampleStats st = sample_stats(traces);
    cell.trace_mean = st.mean;
    cell.trace_stderr = st.stderr_mean;
    cell.probability = per ? static_cast<double>(cell.hits) / per : 0.0;
    if (cell.far && (cell.hits > 0 || cell.trace_mean > 0.0 || !cell.far_ground_ok)) rec.far_boxes_empty = false;
  }

  const std::size_t central = central_index(rec.centers);
  std::vector<WegnerCell> central_cells;
  for (const WegnerCell& c : rec.cells) {
    if (c.center_index == central) central_cells.push_back(c);
  }
  rec.trace_fit = fit_wegner_trace(central_cells, config.side, config.model.dim);
  rec.probability_fit = fit_wegner_probability(central_cells, config.side, config.model.dim);
  // One constant for every box centre, with the exponent capped at 1.
  const double volume = std::pow(config.side, config.model.dim);
  rec.bound_exponent = std::clamp(rec.trace_fit.exponent, 1e-6, 1.0);
  rec.bound_constant = 0.0;
  for (const WegnerCell& c : rec.cells) {
    if (c.trace_mean > 0.0) {
      rec.bound_constant = std::max(rec.bound_constant, c.trace_mean / (std::pow(c.eta, rec.bound_exponent) * volume));
    }
  }
  for (const WegnerCell& c : rec.cells) {
    const double bound = rec.bound_constant * std::pow(c.eta, rec.bound_exponent) * volume;
    if (c.probability > bound * (1.0 + 1e-12) || c.trace_mean > bound * (1.0 + 1e-12)) rec.bound_holds = false;
  }
  return rec;
}

}  // namespace decaylab
