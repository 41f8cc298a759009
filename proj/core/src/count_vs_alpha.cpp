#include <algorithm>
#include <cmath>
#include <limits>

#include "decaylab/error.hpp"
#include "decaylab/experiments.hpp"
#include "decaylab/parallel.hpp"
#include "decaylab/stats.hpp"

namespace decaylab {

double alpha_box_side(const ModelSpec& model, double alpha, double energy, const BoxConfig& box) {
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive for the counting box");
  const double reach = 2.0 * std::pow(model.coupling * model.single_site.periodized_sup() / std::abs(energy), 1.0 / alpha);
  const double side = std::max(reach, box.floor_side);
  if (!std::isfinite(side) || side > 1e12) return std::numeric_limits<double>::infinity();
  return 2.0 * std::ceil(side / 2.0);
}

namespace {

std::size_t grid_unknowns(int dim, double side, double mesh, double buffer) {
  if (!std::isfinite(side)) return std::numeric_limits<std::size_t>::max();
  const double per_axis = std::round((side + 2.0 * buffer) / mesh);
  const double total = std::pow(per_axis, dim);
  return total > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(total);
}

}  // namespace

CountResult count_for_alpha(const ModelSpec& model, double alpha, double energy, const BoxConfig& box,
                            std::uint64_t seed, std::uint32_t realization, const CountOptions& counting) {
  ModelSpec m = model;
  m.envelope = Envelope::power_law(alpha);
  const double mesh = box.mesh > 0.0 ? box.mesh : default_mesh(m.dim);
  const double side = alpha_box_side(m, alpha, energy, box);
  const LatticeDomain domain = build_domain(m.dim, side, mesh, Boundary::Dirichlet);
  const auto h = embedded_operator(m, domain, box.buffer, ImpurityRule::RestrictToBox, seed, realization);
  return count_below(h, energy, counting);
}

std::pair<double, double> alpha_log_band(int dim, double nu0_value, double coupling, double u0, double energy) {
  const double lo = nu0_value > 0.0 ? dim * std::log(1.0 / nu0_value) : std::numeric_limits<double>::quiet_NaN();
  const double hi = dim * std::log(coupling * u0 / std::abs(energy));
  return {lo, hi};
}

CountVsAlphaRecord count_vs_alpha(const CountVsAlphaConfig& config) {
  const ModelSpec& model = config.model;
  if (!(config.energy < 0.0)) throw PreconditionError("count_vs_alpha needs E < 0");
  const double floor = -model.coupling * model.single_site.periodized_sup();
  if (model.coupling > 0.0 && !(config.energy > floor)) {
    throw PreconditionError("count_vs_alpha needs E above the spectral bottom (E > -lambda U0)");
  }
  if (config.e0 && !(config.energy > *config.e0)) {
    throw PreconditionError("count_vs_alpha needs E in ]E0(lambda), 0[");
  }
  CountVsAlphaRecord rec;
  rec.coupling = model.coupling;
  rec.energy = config.energy;
  rec.dim = model.dim;
  rec.realizations = config.realizations;
  if (model.coupling > 0.0) {
    std::tie(rec.band_lo, rec.band_hi) = alpha_log_band(model.dim, config.nu0.value_or(0.0), model.coupling,
                                                        model.single_site.periodized_sup(), config.energy);
  }
  const double mesh = config.box.mesh > 0.0 ? config.box.mesh : default_mesh(model.dim);
  for (double alpha : config.alphas) {
    AlphaCell cell;
    cell.alpha = alpha;
    cell.side = alpha_box_side(model, alpha, config.energy, config.box);
    cell.unknowns = grid_unknowns(model.dim, cell.side, mesh, config.box.buffer);
    if (cell.unknowns > config.box.max_unknowns) {
      cell.skipped = true;
      cell.notice = "skipped: " + std::to_string(cell.unknowns) + " unknowns exceed the budget of " +
                    std::to_string(config.box.max_unknowns);
      rec.cells.push_back(std::move(cell));
      continue;
    }
    cell.counts.assign(config.realizations, 0);
    parallel_for(config.realizations, config.threads, [&](std::size_t r) {
      cell.counts[r] = count_for_alpha(model, alpha, config.energy, config.box, config.seed,
                                       static_cast<std::uint32_t>(r), config.counting)
                           .count;
    });
    std::vector<double> values;
    for (std::size_t n : cell.counts) {
      if (n >= 1) {
        values.push_back(alpha * std::log(static_cast<double>(n)));
      } else {
        ++cell.empty;
      }
    }
    const SampleStats s = sample_stats(values);
    cell.mean_alpha_log_n = values.empty() ? std::numeric_limits<double>::quiet_NaN() : s.mean;
    cell.stderr_alpha_log_n = s.stderr_mean;
    rec.cells.push_back(std::move(cell));
  }
  return rec;
}

SandwichRecord counting_sandwich(const SandwichConfig& config) {
  const CountVsAlphaConfig& cc = config.counts;
  ModelSpec ergodic = cc.model;
  ergodic.envelope = Envelope::power_law(0.0);
  IdsOptions opts;
  opts.mesh = cc.box.mesh;
  opts.threads = cc.threads;
  opts.counting = cc.counting;

  SandwichRecord rec;
  rec.nu0 = nu0(ergodic, cc.energy, config.nu_tolerance, config.e0_side, config.e0_realizations, config.ids_seed, opts);
  rec.nu = config.nu.value_or(0.5 * (rec.nu0.nu0 + 1.0));

  ModelSpec weaker = ergodic;
  weaker.coupling = rec.nu * ergodic.coupling;
  const double energies[] = {cc.energy};
  const IdsEstimate lower =
      estimate_ids(weaker, energies, config.ids_side, Boundary::Dirichlet, config.ids_realizations, config.ids_seed, opts);
  const IdsEstimate upper =
      estimate_ids(ergodic, energies, config.ids_side, Boundary::Neumann, config.ids_realizations, config.ids_seed, opts);
  rec.ids_lower = lower.mean[0];
  rec.ids_lower_se = lower.stderr_mean[0];
  rec.ids_upper = upper.mean[0];
  rec.ids_upper_se = upper.stderr_mean[0];
  rec.delta = config.delta.value_or(2.0 * std::max(rec.ids_lower_se, rec.ids_upper_se));
  if (!(rec.delta > 0.0)) rec.delta = std::numeric_limits<double>::min();

  CountVsAlphaConfig counts = cc;
  counts.nu0 = rec.nu0.nu0;
  counts.e0 = rec.nu0.e0;
  const CountVsAlphaRecord cva = count_vs_alpha(counts);
  for (const AlphaCell& cell : cva.cells) {
    SandwichRow row;
    row.alpha = cell.alpha;
    row.bounds = counting_bounds(ergodic.dim, cell.alpha, rec.nu, rec.delta, ergodic.coupling, cc.energy,
                                 rec.ids_lower, rec.ids_upper, ergodic.single_site.periodized_sup());
    row.counts = cell.counts;
    for (std::size_t n : cell.counts) {
      const double v = static_cast<double>(n);
      if (v >= row.bounds.lower && v <= row.bounds.upper) ++row.inside;
    }
    row.inside_fraction = cell.counts.empty() ? 0.0 : static_cast<double>(row.inside) / cell.counts.size();
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

}  // namespace decaylab
