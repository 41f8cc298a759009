#include <algorithm>
#include <cmath>

#include "decaylab/error.hpp"
#include "decaylab/experiments.hpp"
#include "decaylab/parallel.hpp"
#include "decaylab/stats.hpp"

namespace decaylab {

double below_zero_threshold(double mesh) { return -1e-9 / (mesh * mesh); }

namespace {

// Per-axis centre positions of cubes of side s tiling ]-L/2, L/2[ from both
// ends inward, each cube inside one half of the axis.
std::vector<double> axis_positions(double half, double s) {
  std::vector<double> pos;
  for (int k = 0; half - s - k * s >= -1e-9; ++k) {
    const double c = half - s / 2 - k * s;
    pos.push_back(-c);
    pos.push_back(c);
  }
  std::sort(pos.begin(), pos.end());
  return pos;
}

double ramp(double inset, double mesh, double margin) {
  // 0 on the outermost node layer, 1 once the node is `margin` inside the cube.
  return std::clamp((inset - mesh / 2) / (margin - mesh / 2), 0.0, 1.0);
}

}  // namespace

TrialLayout trial_layout(int dim, double side, double mesh, const std::function<double(double)>& witness, double r0) {
  if (!(side > 2.0 * r0)) throw PreconditionError("trial certificate needs L > 2 R0");
  TrialLayout layout;
  layout.box_side = side;
  layout.mesh = mesh;
  layout.witness_at_side = witness(side);
  if (!(layout.witness_at_side > 0.0)) throw PreconditionError("witness F(L) must be positive");
  layout.nominal_side = std::pow(layout.witness_at_side, -0.25) * side;
  layout.cube_side = std::min(layout.nominal_side, side / 2 - r0);
  const double s = layout.cube_side;
  const double margin = s / 4;
  if (!(margin > mesh)) throw PreconditionError("trial cubes are too small for the mesh");

  const std::vector<double> pos = axis_positions(side / 2, s);
  std::array<std::size_t, kMaxDim> idx{0, 0, 0};
  const std::size_t per_axis = pos.size();
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= per_axis;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    TrialCube cube;
    cube.side = s;
    bool outside_core = false;
    for (int k = 0; k < dim; ++k) {
      idx[k] = rest % per_axis;
      rest /= per_axis;
      cube.center[k] = pos[idx[k]];
      if (std::abs(cube.center[k]) - s / 2 >= r0 - 1e-9) outside_core = true;
    }
    if (outside_core) layout.cubes.push_back(cube);
  }

  const LatticeDomain domain = build_domain(dim, side, mesh, Boundary::Dirichlet);
  const double cell = std::pow(mesh, 0.5 * dim);
  double plateau = 0.0;
  double gradient = 0.0;
  for (TrialCube& cube : layout.cubes) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(domain.size()));
    for (std::size_t i = 0; i < domain.size(); ++i) {
      const Point x = domain.coordinate(i);
      double g = 1.0;
      for (int k = 0; k < dim; ++k) g *= ramp(s / 2 - std::abs(x[k] - cube.center[k]), mesh, margin);
      v[static_cast<Eigen::Index>(i)] = g;
    }
    v /= v.norm();
    plateau = std::max(plateau, v.maxCoeff() / cell);
    for (std::size_t i = 0; i < domain.size(); ++i) {
      auto node = domain.node(i);
      for (int k = 0; k < dim; ++k) {
        auto next = node;
        next[k] += 1;
        const double right = next[k] < domain.shape()[k] ? v[static_cast<Eigen::Index>(domain.index(next))] : 0.0;
        gradient = std::max(gradient, std::abs(right - v[static_cast<Eigen::Index>(i)]) / mesh / cell);
      }
    }
    // Impurity sites j in the open cube.
    std::array<std::int64_t, kMaxDim> lo{0, 0, 0};
    std::array<std::int64_t, kMaxDim> hi{0, 0, 0};
    for (int k = 0; k < dim; ++k) {
      lo[k] = static_cast<std::int64_t>(std::floor(cube.center[k] - s / 2)) + 1;
      hi[k] = static_cast<std::int64_t>(std::ceil(cube.center[k] + s / 2)) - 1;
    }
    Site j{0, 0, 0};
    std::function<void(int)> walk = [&](int k) {
      if (k == dim) {
        cube.sites.push_back(j);
        return;
      }
      for (j[k] = lo[k]; j[k] <= hi[k]; ++j[k]) walk(k + 1);
    };
    walk(0);
    layout.functions.push_back(std::move(v));
  }
  layout.plateau_constant = plateau * std::pow(s, 0.5 * dim);
  layout.gradient_constant = gradient * std::pow(s, 1.0 + 0.5 * dim);
  const double cap = std::pow(layout.witness_at_side, 0.25 * dim);
  layout.kappa = static_cast<double>(layout.cubes.size()) / cap;
  layout.upper_cube_bound_holds = static_cast<double>(layout.cubes.size()) <= cap;
  return layout;
}

TrialRealization trial_realization(const ModelSpec& model, const TrialLayout& layout, double mu, std::uint64_t seed,
                                   std::uint32_t realization, const CountOptions& counting) {
  const LatticeDomain domain = build_domain(model.dim, layout.box_side, layout.mesh, Boundary::Dirichlet);
  const auto h = restricted_operator(model, domain, seed, realization);
  TrialRealization run;
  run.realization = realization;
  run.max_quotient = -std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& v : layout.functions) {
    const double q = v.dot(h.matrix() * v);
    run.quotients.push_back(q);
    run.max_quotient = std::max(run.max_quotient, q);
  }
  const double threshold = below_zero_threshold(layout.mesh);
  run.certified = !layout.functions.empty() && run.max_quotient < threshold;
  run.count = count_below(h, threshold, counting).count;
  run.sound = !run.certified || run.count >= layout.functions.size();

  const DisorderSpec spec{model.distribution, seed, realization};
  run.min_cube_mean = std::numeric_limits<double>::infinity();
  for (const TrialCube& cube : layout.cubes) {
    double sum = 0.0;
    for (const Site& j : cube.sites) sum += sample_site(spec, j);
    const double mean = cube.sites.empty() ? 0.0 : sum / static_cast<double>(cube.sites.size());
    run.min_cube_mean = std::min(run.min_cube_mean, mean);
  }
  run.all_cubes_above_mu = run.min_cube_mean >= mu;
  return run;
}

namespace {

const GeneralEnvelope& require_witness(const ModelSpec& model) {
  const GeneralEnvelope* g = model.envelope.general_spec();
  if (!g) throw PreconditionError("trial certificate needs a general envelope with a witness F and R0");
  return *g;
}

}  // namespace

TrialRecord trial_certificate(const TrialConfig& config) {
  const GeneralEnvelope& g = require_witness(config.model);
  const double mean_omega = config.model.distribution.mean();
  TrialRecord rec;
  rec.mu = config.mu.value_or(0.5 * mean_omega);
  if (!(rec.mu > 0.0 && rec.mu < mean_omega)) throw PreconditionError("trial certificate needs 0 < mu < E[omega]");
  const double mesh = config.mesh > 0.0 ? config.mesh : default_mesh(config.model.dim);
  for (double side : config.sides) {
    TrialSideRecord sr;
    sr.layout = trial_layout(config.model.dim, side, mesh, g.witness, g.r0);
    sr.threshold = below_zero_threshold(mesh);
    // Reject a bad witness before any realization is drawn.
    config.model.envelope.check_witness(build_domain(config.model.dim, side, mesh, Boundary::Dirichlet));
    sr.runs.resize(config.realizations);
    parallel_for(config.realizations, config.threads, [&](std::size_t r) {
      sr.runs[r] = trial_realization(config.model, sr.layout, rec.mu, config.seed, static_cast<std::uint32_t>(r),
                                     config.counting);
    });
    std::size_t ok = 0;
    for (const TrialRealization& run : sr.runs) {
      ok += run.certified ? 1 : 0;
      sr.violations += run.sound ? 0 : 1;
    }
    const double n = static_cast<double>(std::max<std::size_t>(config.realizations, 1));
    sr.success_fraction = ok / n;
    sr.success_stderr = std::sqrt(std::max(sr.success_fraction * (1.0 - sr.success_fraction), 0.25 / n) / n);
    rec.sides.push_back(std::move(sr));
  }
  for (std::size_t i = 1; i < rec.sides.size(); ++i) {
    const auto& a = rec.sides[i - 1];
    const auto& b = rec.sides[i];
    const double sigma = std::hypot(a.success_stderr, b.success_stderr);
    if (b.success_fraction < a.success_fraction - 2.0 * sigma) rec.trend_holds = false;
  }
  return rec;
}

GrowthRecord infinitude_growth(const TrialConfig& config) {
  const GeneralEnvelope& g = require_witness(config.model);
  const double rmax = 0.5 * std::sqrt(static_cast<double>(config.model.dim)) *
                      (config.sides.empty() ? 1.0 : *std::max_element(config.sides.begin(), config.sides.end()));
  const std::string why = witness_admissibility(g.witness, g.r0, std::max(rmax, 2.0 * g.r0));
  if (!why.empty()) throw PreconditionError("witness F rejected: " + why);
  const double mesh = config.mesh > 0.0 ? config.mesh : default_mesh(config.model.dim);
  const double threshold = below_zero_threshold(mesh);
  GrowthRecord rec;
  std::vector<double> sides = config.sides;
  std::sort(sides.begin(), sides.end());
  for (double side : sides) {
    GrowthRow row;
    row.side = side;
    const TrialLayout layout = trial_layout(config.model.dim, side, mesh, g.witness, g.r0);
    row.bound = layout.kappa * std::pow(layout.witness_at_side, 0.25 * config.model.dim);
    const LatticeDomain domain = build_domain(config.model.dim, side, mesh, Boundary::Dirichlet);
    config.model.envelope.check_witness(domain);
    row.counts.assign(config.realizations, 0);
    parallel_for(config.realizations, config.threads, [&](std::size_t r) {
      const auto h = restricted_operator(config.model, domain, config.seed, static_cast<std::uint32_t>(r));
      row.counts[r] = count_below(h, threshold, config.counting).count;
    });
    std::vector<double> values(row.counts.begin(), row.counts.end());
    const SampleStats s = sample_stats(values);
    row.mean_count = s.mean;
    row.stderr_count = s.stderr_mean;
    row.verdict = row.mean_count >= row.bound;
    rec.rows.push_back(std::move(row));
  }
  for (std::size_t i = 1; i < rec.rows.size(); ++i) {
    for (std::size_t r = 0; r < config.realizations; ++r) {
      if (rec.rows[i].counts[r] < rec.rows[i - 1].counts[r]) rec.nested_monotone = false;
    }
  }
  return rec;
}

}  // namespace decaylab
