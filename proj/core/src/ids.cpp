#include "decaylab/ids.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "decaylab/error.hpp"
#include "decaylab/parallel.hpp"
#include "decaylab/stats.hpp"

namespace decaylab {

namespace {

void require_ergodic(const ModelSpec& model) {
  const bool ergodic = model.envelope.is_constant_one() || (model.envelope.is_power_law() && model.envelope.alpha() == 0.0);
  if (!ergodic) throw PreconditionError("IDS quantities are defined for the ergodic (alpha = 0) model");
}

LatticeDomain origin_box(const ModelSpec& model, double side, Boundary bc, const IdsOptions& options) {
  const double mesh = options.mesh > 0.0 ? options.mesh : default_mesh(model.dim);
  return build_domain(model.dim, side, mesh, bc);
}

// -Laplacian + scale * V, reusing the potential sampled at full coupling.
SparseMatrix scaled_potential(const HamiltonianMatrix& h, double scale) {
  SparseMatrix m = discrete_laplacian(h.domain());
  for (std::size_t i = 0; i < h.size(); ++i) {
    m.coeffRef(static_cast<int>(i), static_cast<int>(i)) += scale * h.potential()[i];
  }
  return m;
}

}  // namespace

IdsEstimate estimate_ids(const ModelSpec& model, std::span<const double> energies, double side, Boundary bc,
                         std::size_t realizations, std::uint64_t seed, const IdsOptions& options) {
  require_ergodic(model);
  if (realizations < 1) throw PreconditionError("estimate_ids needs at least one realization");
  for (double e : energies) {
    if (!(e < 0.0)) throw PreconditionError("IDS energies must be negative");
  }
  const LatticeDomain box = origin_box(model, side, bc, options);
  IdsEstimate est;
  est.dim = model.dim;
  est.coupling = model.coupling;
  est.side = side;
  est.boundary = bc;
  est.realizations = realizations;
  est.energies.assign(energies.begin(), energies.end());
  est.counts.assign(realizations, std::vector<std::size_t>(energies.size(), 0));
  std::vector<std::size_t> shifted(realizations, 0);

  parallel_for(realizations, options.threads, [&](std::size_t r) {
    const auto h = restricted_operator(model, box, seed, static_cast<std::uint32_t>(r));
    InertiaCounter counter(h, options.counting);
    for (std::size_t k = 0; k < energies.size(); ++k) {
      const CountResult c = counter.count(energies[k]);
      est.counts[r][k] = c.count;
      shifted[r] += c.shifted ? 1 : 0;
    }
  });

  const double volume = std::pow(side, model.dim);
  std::vector<double> column(realizations);
  for (std::size_t k = 0; k < energies.size(); ++k) {
    for (std::size_t r = 0; r < realizations; ++r) column[r] = static_cast<double>(est.counts[r][k]) / volume;
    const SampleStats s = sample_stats(column);
    est.mean.push_back(s.mean);
    est.stderr_mean.push_back(s.stderr_mean);
  }
  for (std::size_t s : shifted) est.shifted_counts += s;
  return est;
}

void write_ids_csv(std::ostream& out, const IdsEstimate& est) {
  out << "E,mean,stderr,L,bc,realizations\n";
  char buf[160];
  for (std::size_t k = 0; k < est.energies.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,%zu\n", est.energies[k], est.mean[k],
                  est.stderr_mean[k], est.side, to_string(est.boundary).c_str(), est.realizations);
    out << buf;
  }
}

SpectralBottomEstimate estimate_E0(const ModelSpec& model, double side, std::size_t realizations,
                                   std::uint64_t seed, const IdsOptions& options) {
  require_ergodic(model);
  if (realizations < 1) throw PreconditionError("estimate_E0 needs at least one realization");
  const LatticeDomain box = origin_box(model, side, Boundary::Neumann, options);
  SpectralBottomEstimate est;
  est.coupling = model.coupling;
  est.side = side;
  est.realizations = realizations;
  est.lower_bound = -model.coupling * model.single_site.periodized_sup();
  est.ground_energies.assign(realizations, 0.0);
  parallel_for(realizations, options.threads, [&](std::size_t r) {
    const auto h = restricted_operator(model, box, seed, static_cast<std::uint32_t>(r));
    InertiaCounter counter(h, options.counting);
    est.ground_energies[r] = counter.ground_energy();
  });
  est.e0 = *std::min_element(est.ground_energies.begin(), est.ground_energies.end());
  const double slack = 1e-10 * std::max(1.0, std::abs(est.lower_bound));
  if (est.e0 < est.lower_bound - slack) {
    throw Error("estimated spectral bottom undercuts -lambda U0; the operator is inconsistent");
  }
  est.bias_note =
      "minimum of Neumann ground energies on finite boxes; Neumann bracketing biases the estimate downward";
  return est;
}

NuEstimate nu0(const ModelSpec& model, double energy, double tolerance, double side, std::size_t realizations,
               std::uint64_t seed, const IdsOptions& options) {
  require_ergodic(model);
  if (!(tolerance > 0.0)) throw PreconditionError("nu0 tolerance must be positive");
  const SpectralBottomEstimate bottom = estimate_E0(model, side, realizations, seed, options);
  if (!(bottom.e0 < energy && energy < 0.0)) {
    throw PreconditionError("nu0 requires E0(lambda) < E < 0 (E0 estimate " + std::to_string(bottom.e0) + ")");
  }
  const LatticeDomain box = origin_box(model, side, Boundary::Neumann, options);
  std::vector<HamiltonianMatrix> ops;
  ops.reserve(realizations);
  for (std::size_t r = 0; r < realizations; ++r) {
    ops.push_back(restricted_operator(model, box, seed, static_cast<std::uint32_t>(r)));
  }
  // E0(nu lambda) < E  <=>  some realization has an eigenvalue below E at coupling nu lambda.
  const auto below = [&](double nu) {
    std::vector<char> hit(realizations, 0);
    parallel_for(realizations, options.threads, [&](std::size_t r) {
      hit[r] = count_below(scaled_potential(ops[r], nu), energy, options.counting).count > 0;
    });
    return std::any_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
  };
  NuEstimate out;
  out.energy = energy;
  out.coupling = model.coupling;
  out.e0 = bottom.e0;
  out.tolerance = tolerance;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++out.iterations;
  }
  out.nu0 = 0.5 * (lo + hi);
  return out;
}

CountingBounds counting_bounds(int dim, double alpha, double nu, double delta, double coupling, double energy,
                               double ids_lower, double ids_upper, double u0_periodized) {
  if (!(nu > 0.0 && nu < 1.0)) throw PreconditionError("counting_bounds needs nu in ]0,1[");
  if (!(alpha > 0.0)) throw PreconditionError("counting_bounds needs alpha > 0");
  if (!(energy < 0.0)) throw PreconditionError("counting_bounds needs E < 0");
  if (!(delta > 0.0)) throw PreconditionError("counting_bounds needs delta > 0");
  if (dim < 1 || dim > kMaxDim) throw PreconditionError("counting_bounds: dimension out of range");
  CountingBounds b;
  b.inner_side = 2.0 / std::sqrt(static_cast<double>(dim)) * std::sqrt(std::pow(nu, -2.0 / alpha) - 1.0);
  b.outer_side = 2.0 * std::pow(std::abs(coupling * u0_periodized / energy), 1.0 / alpha);
  b.lower = std::max(0.0, std::pow(b.inner_side, dim) * (ids_lower - delta));
  b.upper = std::pow(b.outer_side, dim) * (ids_upper + delta);
  return b;
}

}  // namespace decaylab
