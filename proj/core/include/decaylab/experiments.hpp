#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/hamiltonian.hpp"
#include "decaylab/ids.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

// ---------------------------------------------------------------------------
// Bound-state counts as alpha decreases

struct BoxConfig {
  /// 0 selects default_mesh(dim).
  double mesh = 0.0;
  double buffer = 8.0;
  /// Smallest potential box side, whatever alpha.
  double floor_side = 16.0;
  /// Cells whose computational grid exceeds this many unknowns are skipped.
  std::size_t max_unknowns = 4'000'000;
};

/// Side of the potential box for one alpha: max(2 |lambda U0 / E|^{1/alpha}, floor),
/// rounded up to an even integer.
double alpha_box_side(const ModelSpec& model, double alpha, double energy, const BoxConfig& box);

/// n(H_alpha, E) for one realization; the model's envelope is replaced by <x>^{-alpha}.
CountResult count_for_alpha(const ModelSpec& model, double alpha, double energy, const BoxConfig& box,
                            std::uint64_t seed, std::uint32_t realization, const CountOptions& counting = {});

struct CountVsAlphaConfig {
  ModelSpec model;
  double energy = -0.5;
  std::vector<double> alphas;
  std::size_t realizations = 10;
  std::uint64_t seed = 0;
  BoxConfig box;
  /// Supplies the lower band endpoint d log(1/nu0); left NaN when absent.
  std::optional<double> nu0;
  /// Spectral bottom estimate, checked against E when present.
  std::optional<double> e0;
  unsigned threads = 1;
  CountOptions counting;
};

struct AlphaCell {
  double alpha = 0.0;
  double side = 0.0;
  std::size_t unknowns = 0;
  bool skipped = false;
  std::string notice;
  std::vector<std::size_t> counts;
  /// Mean of alpha log n over realizations with n >= 1.
  double mean_alpha_log_n = 0.0;
  double stderr_alpha_log_n = 0.0;
  std::size_t empty = 0;
};

struct CountVsAlphaRecord {
  double coupling = 0.0;
  double energy = 0.0;
  int dim = 1;
  std::size_t realizations = 0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::vector<AlphaCell> cells;
};

CountVsAlphaRecord count_vs_alpha(const CountVsAlphaConfig& config);

/// d log(1/nu0) and d log(lambda U0 / |E|).
std::pair<double, double> alpha_log_band(int dim, double nu0_value, double coupling, double u0, double energy);

// ---------------------------------------------------------------------------
// Counting sandwich

struct SandwichConfig {
  CountVsAlphaConfig counts;
  double ids_side = 64.0;
  std::size_t ids_realizations = 100;
  std::uint64_t ids_seed = 1;
  double e0_side = 64.0;
  std::size_t e0_realizations = 100;
  double nu_tolerance = 1e-3;
  /// Overrides (nu0 + 1) / 2.
  std::optional<double> nu;
  /// Overrides 2 * max IDS standard error.
  std::optional<double> delta;
};

struct SandwichRow {
  double alpha = 0.0;
  CountingBounds bounds;
  std::vector<std::size_t> counts;
  std::size_t inside = 0;
  double inside_fraction = 0.0;
};

struct SandwichRecord {
  NuEstimate nu0;
  double nu = 0.0;
  double delta = 0.0;
  /// Dirichlet IDS at coupling nu lambda, Neumann IDS at lambda.
  double ids_lower = 0.0;
  double ids_lower_se = 0.0;
  double ids_upper = 0.0;
  double ids_upper_se = 0.0;
  std::vector<SandwichRow> rows;
};

SandwichRecord counting_sandwich(const SandwichConfig& config);

// ---------------------------------------------------------------------------
// Trial-function certificate of infinitely many bound states

struct TrialCube {
  Point center{};
  double side = 0.0;
  std::vector<Site> sites;
};

struct TrialLayout {
  double box_side = 0.0;
  double mesh = 0.0;
  double nominal_side = 0.0;  // [F(L)]^{-1/4} L
  double cube_side = 0.0;     // min(nominal, L/2 - R0)
  std::vector<TrialCube> cubes;
  /// l2-normalized grid vectors on the Dirichlet box of side L, one per cube.
  std::vector<Eigen::VectorXd> functions;
  double plateau_constant = 0.0;  // c0: plateau value = c0 l^{-d/2}
  double gradient_constant = 0.0; // c0': gradient sup = c0' l^{-1-d/2}
  double kappa = 0.0;             // N / F(L)^{d/4}
  double witness_at_side = 0.0;   // F(L)
  bool upper_cube_bound_holds = true;
};

/// Plateau functions for the shell decomposition of the box minus the core of side 2 R0.
TrialLayout trial_layout(int dim, double side, double mesh, const std::function<double(double)>& witness, double r0);

struct TrialRealization {
  std::uint32_t realization = 0;
  std::vector<double> quotients;
  double max_quotient = 0.0;
  bool certified = false;
  std::size_t count = 0;
  bool sound = true;
  /// X_n = mean of omega over the sites of cube n.
  double min_cube_mean = 0.0;
  bool all_cubes_above_mu = false;
};

struct TrialConfig {
  ModelSpec model;  // envelope must be a general envelope carrying a witness
  std::vector<double> sides;
  std::size_t realizations = 10;
  std::uint64_t seed = 0;
  double mesh = 0.0;
  /// 0 < mu < E[omega]; defaults to E[omega] / 2.
  std::optional<double> mu;
  unsigned threads = 1;
  CountOptions counting;
};

struct TrialSideRecord {
  TrialLayout layout;
  double threshold = 0.0;  // -1e-9 h^{-2}
  std::vector<TrialRealization> runs;
  double success_fraction = 0.0;
  double success_stderr = 0.0;
  std::size_t violations = 0;
};

struct TrialRecord {
  double mu = 0.0;
  std::vector<TrialSideRecord> sides;
  /// Success fractions never drop by more than 2 sigma as L grows.
  bool trend_holds = true;
};

/// Negative threshold used for "eigenvalues below 0".
double below_zero_threshold(double mesh);

/// One realization on one layout; the operator is the Dirichlet restriction to the box.
TrialRealization trial_realization(const ModelSpec& model, const TrialLayout& layout, double mu,
                                   std::uint64_t seed, std::uint32_t realization, const CountOptions& counting = {});

TrialRecord trial_certificate(const TrialConfig& config);

struct GrowthRow {
  double side = 0.0;
  double mean_count = 0.0;
  double stderr_count = 0.0;
  double bound = 0.0;  // kappa F(L)^{d/4}
  bool verdict = false;
  std::vector<std::size_t> counts;
};

struct GrowthRecord {
  std::vector<GrowthRow> rows;
  /// Per realization, counts never decrease along the nested boxes.
  bool nested_monotone = true;
};

GrowthRecord infinitude_growth(const TrialConfig& config);

// ---------------------------------------------------------------------------
// Wegner estimate scan

struct WegnerCenter {
  std::string label;  // origin | mid | far | custom
  Point center{};
};

struct WegnerConfig {
  ModelSpec model;
  double reference_energy = -1.0;  // E'
  double energy = -1.0;            // E <= E'
  std::vector<double> etas;
  double side = 64.0;
  std::vector<WegnerCenter> centers;  // empty: default_wegner_centers
  std::size_t realizations = 100;
  std::uint64_t seed = 0;
  double mesh = 0.0;
  double buffer = 8.0;
  unsigned threads = 1;
  CountOptions counting;
};

/// (2 lambda u0 / |E'|)^{1/alpha}; infinite for alpha = 0 unless the bound is vacuous.
double far_region_radius(const ModelSpec& model, double reference_energy);
bool satisfies_far_region(const ModelSpec& model, double reference_energy, const Cube& box);

/// origin, mid-range (half the far radius) and the nearest far box along axis 0.
std::vector<WegnerCenter> default_wegner_centers(const ModelSpec& model, double reference_energy, double side);

/// Throws PreconditionError on E > E', E' >= 0, eta > |E'|/4, non-positive eta or Bernoulli disorder.
void validate_wegner(const WegnerConfig& config);

struct WegnerSample {
  std::size_t trace = 0;  // eigenvalues in J_eta
  bool hit = false;       // dist(spectrum, E) <= eta
  double ground = 0.0;    // only filled for far boxes
  bool ground_ok = true;  // ground >= E'/2 on far boxes
};

/// Finite-volume operator for the box centred at `center`: potential restricted
/// to the box, Dirichlet buffer around it.
WegnerSample wegner_sample(const WegnerConfig& config, const WegnerCenter& center, double eta, bool far,
                           std::uint64_t seed, std::uint32_t realization);

struct WegnerCell {
  std::size_t center_index = 0;
  std::string center_class;
  Point center{};
  bool far = false;
  double eta = 0.0;
  std::uint64_t seed = 0;
  std::size_t hits = 0;
  double probability = 0.0;
  double trace_mean = 0.0;
  double trace_stderr = 0.0;
  bool far_ground_ok = true;
  double far_min_ground = 0.0;
};

struct WegnerFit {
  double exponent = 0.0;
  double exponent_se = 0.0;
  double constant = 0.0;  // smallest Q with value <= Q eta^s L^d on every cell
  std::size_t points = 0;
};

/// Weighted log-log fit of the trace means (weights from their standard errors).
WegnerFit fit_wegner_trace(const std::vector<WegnerCell>& cells, double side, int dim);
/// Plain log-log fit of the probabilities.
WegnerFit fit_wegner_probability(const std::vector<WegnerCell>& cells, double side, int dim);

struct WegnerScanRecord {
  std::vector<WegnerCenter> centers;
  std::vector<WegnerCell> cells;
  /// Fits on the central box.
  WegnerFit trace_fit;
  WegnerFit probability_fit;
  /// Q and s of the bound Q eta^s L^d checked on every cell (s capped at 1).
  double bound_constant = 0.0;
  double bound_exponent = 1.0;
  bool bound_holds = true;
  bool far_boxes_empty = true;
};

WegnerScanRecord wegner_scan(const WegnerConfig& config);

}  // namespace decaylab

#include "decaylab/localization.hpp"

namespace decaylab {

// ---------------------------------------------------------------------------
// Localization campaign

struct LocalizeConfig {
  ModelSpec model;  // envelope replaced by <x>^{-alpha} per call
  double side = 64.0;
  double buffer = 8.0;
  double mesh = 0.0;
  /// Window ]E_min, (1 - fraction) E_min] over the strictly negative spectrum.
  double window_fraction = 0.2;
  FitWindow fit;
  double sule_eps = 0.5;
  double sule_slack = 0.8;
  RadiusConfig radius;
  double radius_safety = 4.0;
  double moment_order = 2.0;
  /// Empty: no dynamics report.
  std::vector<double> times;
  CountOptions counting;
  /// Keep the window's eigenvectors in the result.
  bool keep_vectors = false;
};

struct EigenProfile {
  double energy = 0.0;
  Site center{0, 0, 0};
  double center_norm = 0.0;
  DecayFit fit;
  SuleCheck sule;
  double partition_error = 0.0;
  double predicted_radius = 0.0;
  bool within_radius = true;
};

struct LocalizeRealization {
  double alpha = 0.0;
  std::uint32_t realization = 0;
  double window_lower = 0.0;
  double window_upper = 0.0;
  double ground_energy = 0.0;
  bool complete = true;
  std::vector<EigenProfile> profiles;
  std::optional<DynamicsReport> dynamics;
  /// Filled when keep_vectors is set.
  Eigen::MatrixXd vectors;
};

LocalizeRealization localize_realization(const LocalizeConfig& config, double alpha, std::uint64_t seed,
                                         std::uint32_t realization);

}  // namespace decaylab
