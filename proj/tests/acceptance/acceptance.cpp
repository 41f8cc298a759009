// Runs the acceptance criteria at their stated sizes and tolerances and prints
// one PASS/FAIL line per criterion. Exit status is non-zero if any fails.
// Usage: acceptance [criterion numbers...]

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "decaylab/experiments.hpp"
#include "decaylab/ids.hpp"
#include "decaylab/spectral.hpp"
#include "decaylab/stats.hpp"

using namespace decaylab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

ModelSpec chain_model(double coupling, double alpha = 0.0) {
  ModelSpec m;
  m.dim = 1;
  m.coupling = coupling;
  m.envelope = Envelope::power_law(alpha);
  return m;
}

std::size_t dense_count(const SparseMatrix& h, double energy) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(h), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return static_cast<std::size_t>(std::count_if(ev.data(), ev.data() + ev.size(), [&](double v) { return v < energy; }));
}

// ---------------------------------------------------------------------------

Outcome inertia_oracle() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t mismatches = 0;
  std::size_t comparisons = 0;
  std::size_t largest = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const int dim = instance % 2 == 0 ? 1 : 2;
    ModelSpec model;
    model.dim = dim;
    model.coupling = 0.5 + 9.5 * unit(rng);
    model.envelope = Envelope::power_law(2.0 * unit(rng));
    model.distribution = instance % 3 == 0 ? Distribution::bernoulli(0.5) : Distribution::uniform01();
    const Boundary bc = unit(rng) < 0.5 ? Boundary::Dirichlet : Boundary::Neumann;
    double side = 0.0;
    double mesh = 0.0;
    if (dim == 1) {
      mesh = unit(rng) < 0.5 ? 0.25 : 0.5;
      const int max_side = static_cast<int>(400 * mesh);
      side = 2.0 * std::uniform_int_distribution<int>(2, max_side / 2)(rng);
    } else {
      mesh = unit(rng) < 0.5 ? 0.5 : 1.0;
      const int max_side = static_cast<int>(20 * mesh);
      side = 2.0 * std::uniform_int_distribution<int>(1, max_side / 2)(rng);
    }
    const auto h = restricted_operator(model, build_domain(dim, side, mesh, bc), 1000 + instance, 0);
    largest = std::max(largest, h.size());
    const double energy = -model.coupling * unit(rng) - 0.01;
    const std::size_t expected = dense_count(h.matrix(), energy);
    std::vector<CountMethod> methods{CountMethod::SparseInertia, CountMethod::Dense};
    if (dim == 1) methods.push_back(CountMethod::Sturm);
    for (CountMethod m : methods) {
      CountOptions opts;
      opts.force = m;
      ++comparisons;
      if (count_below(h, energy, opts).count != expected) ++mismatches;
    }
    ++comparisons;
    if (count_below(h, energy).count != expected) ++mismatches;
  }
  return {mismatches == 0,
          format("%zu mismatches in %zu comparisons over 200 instances (largest %zu unknowns)", mismatches, comparisons, largest)};
}

// ---------------------------------------------------------------------------

Outcome monotonicity_suite() {
  const std::vector<double> energies{-4.0, -2.0, -1.0, -0.5, -0.1};
  const std::vector<double> alphas{0.0, 0.25, 0.5, 1.0, 2.0};
  const std::vector<double> couplings{1.0, 2.0, 4.0, 8.0};
  std::size_t violations = 0;
  std::size_t checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    violations += ok ? 0 : 1;
  };
  for (int dim : {1, 2}) {
    const LatticeDomain dir = dim == 1 ? build_domain(1, 64.0, 0.25, Boundary::Dirichlet)
                                       : build_domain(2, 16.0, 0.5, Boundary::Dirichlet);
    const LatticeDomain neu = dim == 1 ? build_domain(1, 64.0, 0.25, Boundary::Neumann)
                                       : build_domain(2, 16.0, 0.5, Boundary::Neumann);
    for (std::uint32_t r = 0; r < 50; ++r) {
      auto model_for = [&](double coupling, double alpha) {
        ModelSpec m;
        m.dim = dim;
        m.coupling = coupling;
        m.envelope = Envelope::power_law(alpha);
        return m;
      };
      // Energy and boundary at (lambda, alpha) = (4, 0.5).
      InertiaCounter d(restricted_operator(model_for(4.0, 0.5), dir, 77, r));
      InertiaCounter n(restricted_operator(model_for(4.0, 0.5), neu, 77, r));
      std::size_t prev = 0;
      for (double e : energies) {
        const std::size_t cd = d.count(e).count;
        const std::size_t cn = n.count(e).count;
        expect(cd >= prev);
        expect(cd <= cn);
        prev = cd;
      }
      std::optional<std::size_t> last;
      for (double a : alphas) {
        const std::size_t c = count_below(restricted_operator(model_for(4.0, a), dir, 77, r), -0.5).count;
        if (last) expect(c <= *last);
        last = c;
      }
      last.reset();
      for (double lambda : couplings) {
        const std::size_t c = count_below(restricted_operator(model_for(lambda, 0.5), dir, 77, r), -0.5).count;
        if (last) expect(c >= *last);
        last = c;
      }
    }
  }
  return {violations == 0, format("%zu violations in %zu exact comparisons (d = 1, 2; 50 realizations each)", violations, checks)};
}

// ---------------------------------------------------------------------------

Outcome certificate_soundness() {
  TrialConfig cfg;
  cfg.model = chain_model(4.0);
  GeneralEnvelope g;
  g.gamma = [](const Point& x, int dim) { return 1.0 / japanese_bracket(x, dim); };
  g.witness = [](double r) { return std::sqrt(r); };
  g.r0 = 2.0;
  g.description = "<x>^-1 with F(r) = sqrt(r)";
  cfg.model.envelope = Envelope::general(std::move(g));
  cfg.sides = {64.0, 128.0, 256.0};
  cfg.realizations = 50;
  cfg.seed = 5;
  const TrialRecord rec = trial_certificate(cfg);
  std::size_t violations = 0;
  std::size_t certified = 0;
  std::string fractions;
  for (const auto& side : rec.sides) {
    violations += side.violations;
    for (const auto& run : side.runs) certified += run.certified ? 1 : 0;
    fractions += format(" L=%g:%.2f", side.layout.box_side, side.success_fraction);
  }
  return {violations == 0 && rec.trend_holds && certified > 0,
          format("%zu certified, %zu violations; success%s; trend %s", certified, violations, fractions.c_str(),
                 rec.trend_holds ? "holds" : "broken")};
}

// ---------------------------------------------------------------------------

Outcome counting_sandwich_check() {
  SandwichConfig s;
  s.counts.model = chain_model(4.0);
  s.counts.energy = -0.5;
  s.counts.alphas = {0.5, 0.4, 0.3};
  s.counts.realizations = 100;
  s.counts.seed = 11;
  s.ids_side = 128.0;
  s.ids_realizations = 200;
  s.e0_side = 128.0;
  s.e0_realizations = 200;
  const SandwichRecord rec = counting_sandwich(s);
  bool ok = !rec.rows.empty();
  std::string rows;
  for (const auto& row : rec.rows) {
    ok = ok && row.inside_fraction >= 0.95;
    rows += format(" a=%.1f:[%.1f,%.1f] %.0f%%", row.alpha, row.bounds.lower, row.bounds.upper, 100.0 * row.inside_fraction);
  }
  return {ok, format("nu0=%.3f nu=%.3f delta=%.4f;%s", rec.nu0.nu0, rec.nu, rec.delta, rows.c_str())};
}

// ---------------------------------------------------------------------------

Outcome band_trend() {
  CountVsAlphaConfig c;
  c.model = chain_model(4.0);
  c.model.single_site = SingleSitePotential::cube(8.0);
  c.energy = -0.5;
  c.alphas = {0.5, 0.4, 0.3};
  c.realizations = 10;
  c.seed = 7;
  c.box.max_unknowns = 20'000'000;
  const CountVsAlphaRecord rec = count_vs_alpha(c);
  bool ok = rec.cells.size() == 3;
  std::string values;
  for (std::size_t k = 0; k < rec.cells.size(); ++k) {
    const auto& cell = rec.cells[k];
    ok = ok && !cell.skipped && cell.empty == 0;
    if (k > 0) ok = ok && cell.mean_alpha_log_n > rec.cells[k - 1].mean_alpha_log_n;
    values += format(" a=%.1f:%.3f", cell.alpha, cell.mean_alpha_log_n);
  }
  const double last = rec.cells.empty() ? 0.0 : rec.cells.back().mean_alpha_log_n;
  const double gap = std::abs(last - rec.band_hi) / rec.band_hi;
  ok = ok && gap <= 0.25;
  return {ok, format("U0=8; mean alpha log n%s; band top %.3f; gap at smallest alpha %.1f%%", values.c_str(), rec.band_hi,
                     100.0 * gap)};
}

// ---------------------------------------------------------------------------

std::vector<double> wegner_etas(double reference) {
  std::vector<double> etas;
  for (int k = 0; k < 6; ++k) etas.push_back(0.25 * std::abs(reference) * std::pow(10.0, -2.0 + 2.0 * k / 5.0));
  return etas;
}

Outcome far_box_emptiness() {
  WegnerConfig w;
  w.model = chain_model(4.0, 1.0);
  w.reference_energy = -1.0;
  w.energy = -1.0;
  w.etas = wegner_etas(w.reference_energy);
  w.side = 64.0;
  w.realizations = 200;
  w.seed = 13;
  const WegnerScanRecord rec = wegner_scan(w);
  std::size_t far_cells = 0;
  std::size_t hits = 0;
  bool ground_ok = true;
  double min_ground = std::numeric_limits<double>::infinity();
  for (const auto& cell : rec.cells) {
    if (!cell.far) continue;
    ++far_cells;
    hits += cell.hits;
    ground_ok = ground_ok && cell.far_ground_ok;
    min_ground = std::min(min_ground, cell.far_min_ground);
  }
  return {far_cells > 0 && hits == 0 && ground_ok && rec.far_boxes_empty,
          format("%zu far cells x 200 realizations: %zu hits, min ground %.4f vs E'/2 = %.2f", far_cells, hits, min_ground,
                 0.5 * w.reference_energy)};
}

Outcome wegner_exponent() {
  WegnerConfig w;
  w.model = chain_model(4.0, 0.0);
  w.reference_energy = -1.0;
  w.energy = -1.0;
  w.etas = wegner_etas(w.reference_energy);
  w.side = 64.0;
  w.centers = {WegnerCenter{"origin", Point{0.0, 0.0, 0.0}}};
  w.realizations = 500;
  w.seed = 3;
  const WegnerScanRecord rec = wegner_scan(w);
  const double s = rec.trace_fit.exponent;
  return {s >= 0.9 && s <= 1.1,
          format("trace-mean exponent %.3f +- %.3f over %zu etas; probability-fit exponent %.3f", s,
                 rec.trace_fit.exponent_se, rec.trace_fit.points, rec.probability_fit.exponent)};
}

// ---------------------------------------------------------------------------

struct LocalizationCampaign {
  std::vector<double> alphas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> median_mass;
  std::vector<double> median_sup;
  std::size_t profiles = 0;
  std::size_t refused = 0;
  std::size_t sule_failures = 0;
  std::size_t radius_failures = 0;
  std::size_t domination_failures = 0;
  std::size_t incomplete = 0;
  double max_ratio = 0.0;
  double seconds = 0.0;
};

const LocalizationCampaign& localization_campaign() {
  static const LocalizationCampaign campaign = [] {
    LocalizationCampaign out;
    const auto start = std::chrono::steady_clock::now();
    LocalizeConfig c;
    c.model = chain_model(8.0);
    c.side = 64.0;
    c.buffer = 8.0;
    c.window_fraction = 0.2;
    c.radius_safety = 4.0;
    c.moment_order = 2.0;
    c.times.push_back(0.0);
    for (int k = 0; k < 40; ++k) c.times.push_back(std::pow(10.0, -1.0 + 4.0 * k / 39.0));
    for (double a : out.alphas) {
      std::vector<double> masses;
      std::vector<double> sups;
      for (std::uint32_t r = 0; r < 30; ++r) {
        const LocalizeRealization lr = localize_realization(c, a, 2024, r);
        out.incomplete += lr.complete ? 0 : 1;
        for (const auto& p : lr.profiles) {
          ++out.profiles;
          out.radius_failures += p.within_radius ? 0 : 1;
          if (std::isfinite(p.predicted_radius)) {
            out.max_ratio = std::max(out.max_ratio, p.center_norm / p.predicted_radius);
          }
          if (p.fit.refused) {
            ++out.refused;
            continue;
          }
          masses.push_back(p.fit.mass);
          out.sule_failures += p.sule.passed() ? 0 : 1;
        }
        if (lr.dynamics) {
          sups.push_back(lr.dynamics->sup_moment);
          out.domination_failures += lr.dynamics->dominated ? 0 : 1;
        } else {
          ++out.domination_failures;
        }
      }
      out.median_mass.push_back(masses.empty() ? 0.0 : median(masses));
      out.median_sup.push_back(sups.empty() ? 0.0 : median(sups));
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }();
  return campaign;
}

Outcome mass_uniformity() {
  const auto& c = localization_campaign();
  const double reference = c.median_mass.front();
  const double lowest = *std::min_element(c.median_mass.begin(), c.median_mass.end());
  const bool mass_ok = reference > 0.0 && lowest >= 0.5 * reference;
  std::string medians;
  for (std::size_t k = 0; k < c.alphas.size(); ++k) medians += format(" %.2f:%.3f", c.alphas[k], c.median_mass[k]);
  return {mass_ok && c.sule_failures == 0 && c.incomplete == 0,
          format("median mass%s (min/ref %.2f, %s); SULE failures %zu of %zu fitted profiles", medians.c_str(),
                 reference > 0.0 ? lowest / reference : 0.0, mass_ok ? "ok" : "low", c.sule_failures,
                 c.profiles - c.refused)};
}

Outcome center_radius() {
  const auto& c = localization_campaign();
  return {c.radius_failures == 0 && c.incomplete == 0,
          format("%zu of %zu centres outside 4x the predicted radius (largest |x|/radius %.2f; alpha = 0 has no finite radius)",
                 c.radius_failures, c.profiles, c.max_ratio)};
}

Outcome dynamics_surrogate() {
  const auto& c = localization_campaign();
  const double hi = *std::max_element(c.median_sup.begin(), c.median_sup.end());
  const double lo = *std::min_element(c.median_sup.begin(), c.median_sup.end());
  const double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  std::string medians;
  for (std::size_t k = 0; k < c.alphas.size(); ++k) medians += format(" %.2f:%.3g", c.alphas[k], c.median_sup[k]);
  return {ratio <= 3.0 && c.domination_failures == 0,
          format("median sup M2%s; max/min %.2f; domination failures %zu", medians.c_str(), ratio, c.domination_failures)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "inertia count matches dense diagonalization", 60, inertia_oracle},
      {2, "exact monotonicity suite", 120, monotonicity_suite},
      {3, "trial certificate soundness and trend", 600, certificate_soundness},
      {4, "counting sandwich", 900, counting_sandwich_check},
      {5, "alpha log n trend toward the band top", 900, band_trend},
      {6, "far boxes empty", 300, far_box_emptiness},
      {7, "Wegner exponent on the central box", 600, wegner_exponent},
      {8, "localization mass uniformity and SULE", 600, mass_uniformity},
      {9, "localization centres within the radius bound", 600, center_radius},
      {10, "dynamics surrogate", 600, dynamics_surrogate},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.id >= 8) seconds = std::max(seconds, localization_campaign().seconds);
    const bool in_budget = seconds <= c.budget_seconds;
    const bool passed = outcome.passed && in_budget;
    failures += passed ? 0 : 1;
    std::printf("criterion %2d %s: %s -- %s [%.1fs%s]\n", c.id, passed ? "PASS" : "FAIL", c.name, outcome.detail.c_str(),
                seconds, in_budget ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
