#include "kinds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "decaylab/experiments.hpp"
#include "decaylab/ids.hpp"
#include "decaylab/rng.hpp"
#include "decaylab/stats.hpp"

namespace decaylab::harness::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t grid_unknowns(int dim, double side, double mesh, double buffer = 0.0) {
  if (!std::isfinite(side)) return std::numeric_limits<std::size_t>::max();
  const double total = std::pow(std::round((side + 2.0 * buffer) / mesh), dim);
  return total > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(total);
}

std::string budget_notice(std::size_t unknowns, std::size_t budget) {
  return "skipped: " + std::to_string(unknowns) + " unknowns exceed the budget of " + std::to_string(budget);
}

bool ok_row(const Table& t, std::size_t i) { return t.text(i, "status") == "ok"; }
std::size_t row_cell(const Table& t, std::size_t i) { return static_cast<std::size_t>(t.number(i, "cell")); }
std::size_t row_param(const Table& t, std::size_t i) { return static_cast<std::size_t>(t.number(i, "param")); }
std::size_t row_realization(const Table& t, std::size_t i) { return static_cast<std::size_t>(t.number(i, "realization")); }

std::map<std::size_t, std::vector<std::size_t>> rows_by_param(const Table& t) {
  std::map<std::size_t, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) out[row_param(t, i)].push_back(i);
  return out;
}

std::vector<double> column_values(const Table& t, const std::vector<std::size_t>& rows, const std::string& name) {
  std::vector<double> v;
  for (std::size_t i : rows) {
    if (!ok_row(t, i)) continue;
    const double x = t.number(i, name);
    if (std::isfinite(x)) v.push_back(x);
  }
  return v;
}

std::size_t ok_count(const Table& t, const std::vector<std::size_t>& rows) {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](std::size_t i) { return ok_row(t, i); }));
}

CheckResult make_check(std::string name, bool finding = false) {
  CheckResult c;
  c.name = std::move(name);
  c.finding = finding;
  return c;
}

void fail(CheckResult& c, std::size_t cell) {
  c.passed = false;
  if (std::find(c.cells.begin(), c.cells.end(), cell) == c.cells.end()) c.cells.push_back(cell);
}

// Realization-wise check that `name` moves monotonically along the parameter
// order given by `key` (ascending); `increasing` selects the direction.
CheckResult monotone_check(const Table& t, const std::string& check_name, const std::string& name,
                           const std::function<double(std::size_t)>& key, bool increasing) {
  CheckResult c = make_check(check_name);
  std::map<std::size_t, std::vector<std::size_t>> by_r;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (ok_row(t, i)) by_r[row_realization(t, i)].push_back(i);
  }
  std::size_t compared = 0;
  for (auto& [r, rows] : by_r) {
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double prev = t.number(rows[k - 1], name);
      const double cur = t.number(rows[k], name);
      ++compared;
      const bool ok = increasing ? cur >= prev : cur <= prev;
      if (!ok) {
        fail(c, row_cell(t, rows[k - 1]));
        fail(c, row_cell(t, rows[k]));
      }
    }
  }
  c.detail = std::to_string(compared) + " neighbouring pairs compared";
  return c;
}

// ---------------------------------------------------------------------------

class IdsKind : public Kind {
 public:
  explicit IdsKind(const ExperimentConfig& c) : Kind(c), model_(model_spec(c.model)), mesh_(resolved_mesh(c)) {}

  std::size_t params() const override { return config_.campaign.energies.size(); }
  std::vector<std::string> columns() const override {
    return {"energy", "side", "boundary", "unknowns", "count", "ids", "shifted"};
  }

  CellOutput compute(const CellSeed& cell) const override {
    const double e = config_.campaign.energies[cell.param];
    const double side = config_.numerics.side;
    const std::size_t unknowns = grid_unknowns(model_.dim, side, mesh_);
    CellOutput out;
    out.values = {format_number(e), format_number(side), to_string(config_.numerics.boundary), format_count(unknowns)};
    if (unknowns > config_.numerics.max_unknowns) {
      out.skipped = true;
      out.notice = budget_notice(unknowns, config_.numerics.max_unknowns);
      out.values.insert(out.values.end(), {"", "", ""});
      return out;
    }
    const LatticeDomain box = build_domain(model_.dim, side, mesh_, config_.numerics.boundary);
    const auto h = restricted_operator(model_, box, cell.seed, cell.stream);
    const CountResult c = count_below(h, e);
    out.values.push_back(format_count(c.count));
    out.values.push_back(format_number(static_cast<double>(c.count) / std::pow(side, model_.dim)));
    out.values.push_back(format_flag(c.shifted));
    return out;
  }

  Aggregate aggregate(const RunTables& run) const override {
    Aggregate a;
    a.table.header = {"E", "mean", "stderr", "L", "bc", "realizations"};
    for (const auto& [p, rows] : rows_by_param(run.cells)) {
      const std::vector<double> ids = column_values(run.cells, rows, "ids");
      const SampleStats s = sample_stats(ids);
      a.table.rows.push_back({format_number(config_.campaign.energies[p]), format_number(ids.empty() ? kNaN : s.mean),
                              format_number(s.stderr_mean), format_number(config_.numerics.side),
                              to_string(config_.numerics.boundary), format_count(ids.size())});
    }
    return a;
  }

  std::vector<CheckResult> invariants(const RunTables& run) const override {
    const Table& t = run.cells;
    std::vector<CheckResult> out;
    out.push_back(monotone_check(t, "count non-decreasing in E", "count",
                                 [&](std::size_t i) { return t.number(i, "energy"); }, true));
    CheckResult bounds = make_check("0 <= count <= unknowns");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (ok_row(t, i) && !(t.number(i, "count") >= 0.0 && t.number(i, "count") <= t.number(i, "unknowns"))) {
        fail(bounds, row_cell(t, i));
      }
    }
    out.push_back(bounds);
    return out;
  }

 private:
  ModelSpec model_;
  double mesh_;
};

// ---------------------------------------------------------------------------

class E0Kind : public Kind {
 public:
  explicit E0Kind(const ExperimentConfig& c) : Kind(c), model_(model_spec(c.model)), mesh_(resolved_mesh(c)) {}

  std::size_t params() const override { return 1; }
  std::vector<std::string> columns() const override { return {"side", "unknowns", "ground", "lower_bound"}; }

  double lower_bound() const { return -model_.coupling * model_.single_site.periodized_sup(); }

  CellOutput compute(const CellSeed& cell) const override {
    const double side = config_.numerics.side;
    const std::size_t unknowns = grid_unknowns(model_.dim, side, mesh_);
    CellOutput out;
    out.values = {format_number(side), format_count(unknowns)};
    if (unknowns > config_.numerics.max_unknowns) {
      out.skipped = true;
      out.notice = budget_notice(unknowns, config_.numerics.max_unknowns);
      out.values.insert(out.values.end(), {"", format_number(lower_bound())});
      return out;
    }
    const LatticeDomain box = build_domain(model_.dim, side, mesh_, Boundary::Neumann);
    const auto h = restricted_operator(model_, box, cell.seed, cell.stream);
    InertiaCounter counter(h);
    out.values.push_back(format_number(counter.ground_energy()));
    out.values.push_back(format_number(lower_bound()));
    return out;
  }

  Aggregate aggregate(const RunTables& run) const override {
    Aggregate a;
    a.table.header = {"L", "realizations", "e0", "mean_ground", "stderr_ground", "lower_bound"};
    for (const auto& [p, rows] : rows_by_param(run.cells)) {
      const std::vector<double> g = column_values(run.cells, rows, "ground");
      const SampleStats s = sample_stats(g);
      const double e0 = g.empty() ? kNaN : *std::min_element(g.begin(), g.end());
      a.table.rows.push_back({format_number(config_.numerics.side), format_count(g.size()), format_number(e0),
                              format_number(g.empty() ? kNaN : s.mean), format_number(s.stderr_mean),
                              format_number(lower_bound())});
      a.summary["e0"] = e0;
    }
    a.summary["bias_note"] = "minimum of Neumann ground energies; Neumann bracketing biases the estimate downward";
    return a;
  }

  std::vector<CheckResult> invariants(const RunTables& run) const override {
    const Table& t = run.cells;
    CheckResult c = make_check("ground energy >= -lambda U0");
    const double slack = 1e-10 * std::max(1.0, std::abs(lower_bound()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (ok_row(t, i) && !(t.number(i, "ground") >= lower_bound() - slack)) fail(c, row_cell(t, i));
    }
    return {c};
  }

 private:
  ModelSpec model_;
  double mesh_;
};

// ---------------------------------------------------------------------------

class CountVsAlphaKind : public Kind {
 public:
  explicit CountVsAlphaKind(const ExperimentConfig& c) : Kind(c), model_(model_spec(c.model)), mesh_(resolved_mesh(c)) {
    box_.mesh = mesh_;
    box_.buffer = c.numerics.buffer;
    box_.floor_side = c.numerics.floor_side;
    box_.max_unknowns = c.numerics.max_unknowns;
    const double floor = -model_.coupling * model_.single_site.periodized_sup();
    if (model_.coupling > 0.0 && !(c.campaign.energy > floor)) {
      throw PreconditionError("count-vs-alpha needs E above the spectral bottom (E > -lambda U0)");
    }
  }

  std::size_t params() const override { return config_.campaign.alphas.size(); }
  std::vector<std::string> columns() const override {
    return {"alpha", "side", "unknowns", "energy", "count", "alpha_log_n", "shifted"};
  }

  json compute_prelude() const override {
    json p;
    const double u0 = model_.single_site.periodized_sup();
    const double e = config_.campaign.energy;
    double nu = kNaN;
    if (config_.campaign.nu0) {
      nu = *config_.campaign.nu0;
      p["nu0_source"] = "config";
    } else if (model_.coupling > 0.0) {
      ModelSpec ergodic = model_;
      ergodic.envelope = Envelope::power_law(0.0);
      IdsOptions opts;
      opts.mesh = mesh_;
      const NuEstimate est = nu0(ergodic, e, config_.numerics.nu_tolerance, config_.campaign.nu0_side,
                                 config_.campaign.nu0_realizations, derive_seed(config_.campaign.seed, 0, 1), opts);
      nu = est.nu0;
      p["nu0_source"] = "estimated";
      p["e0"] = est.e0;
      p["nu0_seed"] = derive_seed(config_.campaign.seed, 0, 1);
    }
    p["nu0"] = std::isfinite(nu) ? json(nu) : json(nullptr);
    if (model_.coupling > 0.0) {
      const auto [lo, hi] = alpha_log_band(model_.dim, std::isfinite(nu) ? nu : 0.0, model_.coupling, u0, e);
      p["band_lo"] = std::isfinite(lo) ? json(lo) : json(nullptr);
      p["band_hi"] = hi;
    } else {
      p["band_lo"] = nullptr;
      p["band_hi"] = nullptr;
    }
    return p;
  }

  void set_prelude(const json& p) override {
    band_lo_ = p.contains("band_lo") && p["band_lo"].is_number() ? p["band_lo"].get<double>() : kNaN;
    band_hi_ = p.contains("band_hi") && p["band_hi"].is_number() ? p["band_hi"].get<double>() : kNaN;
  }

  CellOutput compute(const CellSeed& cell) const override {
    const double alpha = config_.campaign.alphas[cell.param];
    const double e = config_.campaign.energy;
    const double side = alpha_box_side(model_, alpha, e, box_);
    const std::size_t unknowns = grid_unknowns(model_.dim, side, mesh_, box_.buffer);
    CellOutput out;
    out.values = {format_number(alpha), format_number(side), format_count(unknowns), format_number(e)};
    if (unknowns > box_.max_unknowns) {
      out.skipped = true;
      out.notice = "alpha = " + format_number(alpha) + " " + budget_notice(unknowns, box_.max_unknowns);
      out.values.insert(out.values.end(), {"", "", ""});
      return out;
    }
    const CountResult c = count_for_alpha(model_, alpha, e, box_, cell.seed, cell.stream);
    out.values.push_back(format_count(c.count));
    out.values.push_back(format_number(c.count ? alpha * std::log(static_cast<double>(c.count)) : kNaN));
    out.values.push_back(format_flag(c.shifted));
    return out;
  }

  Aggregate aggregate(const RunTables& run) const override {
    Aggregate a;
    a.table.header = {"alpha", "side", "unknowns", "realizations", "empty", "mean_alpha_log_n", "stderr_alpha_log_n",
                      "band_lo", "band_hi", "skipped"};
    const Table& t = run.cells;
    for (const auto& [p, rows] : rows_by_param(t)) {
      const std::vector<double> v = column_values(t, rows, "alpha_log_n");
      const std::size_t ok = ok_count(t, rows);
      const SampleStats s = sample_stats(v);
      a.table.rows.push_back({format_number(config_.campaign.alphas[p]), t.text(rows.front(), "side"),
                              t.text(rows.front(), "unknowns"), format_count(ok), format_count(ok - v.size()),
                              format_number(v.empty() ? kNaN : s.mean), format_number(s.stderr_mean),
                              format_number(band_lo_), format_number(band_hi_), format_flag(ok == 0)});
    }
    a.summary["band_lo"] = std::isfinite(band_lo_) ? json(band_lo_) : json(nullptr);
    a.summary["band_hi"] = std::isfinite(band_hi_) ? json(band_hi_) : json(nullptr);
    return a;
  }

  std::vector<CheckResult> invariants(const RunTables& run) const override {
    const Table& t = run.cells;
    std::vector<CheckResult> out;
    out.push_back(monotone_check(t, "count non-increasing in alpha", "count",
                                 [&](std::size_t i) { return t.number(i, "alpha"); }, false));
    // Mean alpha log n should rise as alpha decreases, toward the upper band.
    CheckResult trend = make_check("mean alpha log n rises toward the band as alpha decreases", true);
    const Aggregate a = aggregate(run);
    std::vector<std::pair<double, double>> means;
    for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
      const double m = parse_number(a.table.rows[i][5]);
      if (std::isfinite(m)) means.emplace_back(parse_number(a.table.rows[i][0]), m);
    }
    std::sort(means.begin(), means.end(), [](auto& x, auto& y) { return x.first > y.first; });
    for (std::size_t i = 1; i < means.size(); ++i) {
      if (means[i].second < means[i - 1].second) trend.passed = false;
    }
    if (!means.empty() && std::isfinite(band_hi_)) {
      trend.detail = "smallest alpha: " + format_number(means.back().second) + " vs band top " + format_number(band_hi_);
    }
    out.push_back(trend);
    return out;
  }

 private:
  ModelSpec model_;
  double mesh_;
  BoxConfig box_;
  double band_lo_ = kNaN;
  double band_hi_ = kNaN;
};

// ---------------------------------------------------------------------------

class TrialKind : public Kind {
 public:
  TrialKind(const ExperimentConfig& c, bool growth)
      : Kind(c), growth_(growth), model_(model_spec(c.model)), mesh_(resolved_mesh(c)) {
    const GeneralEnvelope* g = model_.envelope.general_spec();
    if (!g) throw PreconditionError("trial experiments need an envelope witness");
    if (growth_) {
      const double rmax = 0.5 * std::sqrt(static_cast<double>(model_.dim)) *
                          *std::max_element(c.campaign.sides.begin(), c.campaign.sides.end());
      const std::string why = witness_admissibility(g->witness, g->r0, std::max(rmax, 2.0 * g->r0));
      if (!why.empty()) throw PreconditionError("witness F rejected: " + why);
    }
    mu_ = c.campaign.mu.value_or(0.5 * model_.distribution.mean());
    for (double side : c.campaign.sides) {
      model_.envelope.check_witness(build_domain(model_.dim, side, mesh_, Boundary::Dirichlet));
      layouts_.push_back(trial_layout(model_.dim, side, mesh_, g->witness, g->r0));
    }
  }

  std::size_t params() const override { return layouts_.size(); }
  std::vector<std::string> columns() const override {
    if (growth_) return {"side", "unknowns", "count", "bound", "kappa"};
    return {"side",  "unknowns", "cubes", "cube_side",     "kappa",   "max_quotient",
            "certified", "count", "sound", "min_cube_mean", "above_mu"};
  }

  json compute_prelude() const override {
    json layouts = json::array();
    for (const TrialLayout& l : layouts_) {
      layouts.push_back({{"side", l.box_side},
                         {"cubes", l.cubes.size()},
                         {"cube_side", l.cube_side},
                         {"nominal_side", l.nominal_side},
                         {"kappa", l.kappa},
                         {"witness_at_side", l.witness_at_side},
                         {"plateau_constant", l.plateau_constant},
                         {"gradient_constant", l.gradient_constant},
                         {"upper_cube_bound_holds", l.upper_cube_bound_holds}});
    }
    json p{{"layouts", layouts}, {"threshold", below_zero_threshold(mesh_)}};
    if (!growth_) p["mu"] = mu_;
    return p;
  }

  CellOutput compute(const CellSeed& cell) const override {
    const TrialLayout& layout = layouts_[cell.param];
    const std::size_t unknowns = grid_unknowns(model_.dim, layout.box_side, mesh_);
    CellOutput out;
    out.values = {format_number(layout.box_side), format_count(unknowns)};
    const std::size_t blanks = columns().size() - 2;
    if (unknowns > config_.numerics.max_unknowns) {
      out.skipped = true;
      out.notice = budget_notice(unknowns, config_.numerics.max_unknowns);
      out.values.resize(out.values.size() + blanks);
      return out;
    }
    if (growth_) {
      const LatticeDomain domain = build_domain(model_.dim, layout.box_side, mesh_, Boundary::Dirichlet);
      const auto h = restricted_operator(model_, domain, cell.seed, cell.stream);
      const std::size_t n = count_below(h, below_zero_threshold(mesh_)).count;
      const double bound = layout.kappa * std::pow(layout.witness_at_side, 0.25 * model_.dim);
      out.values.insert(out.values.end(), {format_count(n), format_number(bound), format_number(layout.kappa)});
      return out;
    }
    const TrialRealization run = trial_realization(model_, layout, mu_, cell.seed, cell.stream);
    out.values.insert(out.values.end(),
                      {format_count(layout.cubes.size()), format_number(layout.cube_side), format_number(layout.kappa),
                       format_number(run.max_quotient), format_flag(run.certified), format_count(run.count),
                       format_flag(run.sound), format_number(run.min_cube_mean), format_flag(run.all_cubes_above_mu)});
    return out;
  }

  Aggregate aggregate(const RunTables& run) const override {
    const Table& t = run.cells;
    Aggregate a;
    if (growth_) {
      a.table.header = {"L", "realizations", "mean_count", "stderr_count", "bound", "verdict"};
    } else {
      a.table.header = {"L", "cubes", "kappa", "realizations", "certified", "success_fraction", "success_stderr",
                        "violations"};
    }
    for (const auto& [p, rows] : rows_by_param(t)) {
      const TrialLayout& layout = layouts_[p];
      const std::size_t ok = ok_count(t, rows);
      if (growth_) {
        const std::vector<double> counts = column_values(t, rows, "count");
        const SampleStats s = sample_stats(counts);
        const double bound = layout.kappa * std::pow(layout.witness_at_side, 0.25 * model_.dim);
        a.table.rows.push_back({format_number(layout.box_side), format_count(ok),
                                format_number(counts.empty() ? kNaN : s.mean), format_number(s.stderr_mean),
                                format_number(bound), format_flag(!counts.empty() && s.mean >= bound)});
        continue;
      }
      std::size_t certified = 0, violations = 0;
      for (std::size_t i : rows) {
        if (!ok_row(t, i)) continue;
        certified += t.number(i, "certified") == 1.0 ? 1 : 0;
        violations += t.number(i, "sound") == 1.0 ? 0 : 1;
      }
      const double n = static_cast<double>(std::max<std::size_t>(ok, 1));
      const double frac = certified / n;
      const double se = std::sqrt(std::max(frac * (1.0 - frac), 0.25 / n) / n);
      a.table.rows.push_back({format_number(layout.box_side), format_count(layout.cubes.size()),
                              format_number(layout.kappa), format_count(ok), format_count(certified),
                              format_number(ok ? frac : kNaN), format_number(se), format_count(violations)});
    }
    return a;
  }

  std::vector<CheckResult> invariants(const RunTables& run) const override {
    const Table& t = run.cells;
    std::vector<CheckResult> out;
    if (growth_) {
      out.push_back(monotone_check(t, "count non-decreasing along nested boxes", "count",
                                   [&](std::size_t i) { return t.number(i, "side"); }, true));
      CheckResult verdict = make_check("mean count >= kappa F(L)^{d/4}", true);
      const Aggregate a = aggregate(run);
      for (const Row& r : a.table.rows) {
        if (r.back() != "1") verdict.passed = false;
      }
      out.push_back(verdict);
      return out;
    }
    // Re-runs the inertia count on every certified realization.
    CheckResult sound = make_check("certified => count >= N (inertia oracle re-run)");
    std::size_t certified = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (!ok_row(t, i) || t.number(i, "certified") != 1.0) continue;
      ++certified;
      const std::size_t p = row_param(t, i);
      if (p >= layouts_.size()) {
        fail(sound, row_cell(t, i));
        continue;
      }
      const TrialLayout& layout = layouts_[p];
      const LatticeDomain domain = build_domain(model_.dim, layout.box_side, mesh_, Boundary::Dirichlet);
      const auto h = restricted_operator(model_, domain, std::stoull(t.text(i, "seed")),
                                         static_cast<std::uint32_t>(std::stoul(t.text(i, "stream"))));
      const std::size_t n = count_below(h, below_zero_threshold(mesh_)).count;
      if (n < layout.cubes.size()) fail(sound, row_cell(t, i));
    }
    sound.detail = std::to_string(certified) + " certified cells re-counted";
    out.push_back(sound);

    CheckResult trend = make_check("success fraction non-decreasing in L within 2 sigma", true);
    const Aggregate a = aggregate(run);
    for (std::size_t i = 1; i < a.table.rows.size(); ++i) {
      const double f0 = parse_number(a.table.rows[i - 1][5]), s0 = parse_number(a.table.rows[i - 1][6]);
      const double f1 = parse_number(a.table.rows[i][5]), s1 = parse_number(a.table.rows[i][6]);
      if (f1 < f0 - 2.0 * std::hypot(s0, s1)) trend.passed = false;
    }
    out.push_back(trend);
    return out;
  }

 private:
  bool growth_;
  ModelSpec model_;
  double mesh_;
  double mu_ = 0.0;
  std::vector<TrialLayout> layouts_;
};

// ---------------------------------------------------------------------------

class WegnerKind : public Kind {
 public:
  explicit WegnerKind(const ExperimentConfig& c) : Kind(c), mesh_(resolved_mesh(c)) {
    wc_.model = model_spec(c.model);
    wc_.reference_energy = c.campaign.reference_energy;
    wc_.energy = c.campaign.energy;
    wc_.etas = c.campaign.etas;
    wc_.side = c.numerics.side;
    wc_.realizations = c.campaign.realizations;
    wc_.seed = c.campaign.seed;
    wc_.mesh = mesh_;
    wc_.buffer = c.numerics.buffer;
    validate_wegner(wc_);
    centers_ = c.campaign.centers.empty() ? default_wegner_centers(wc_.model, wc_.reference_energy, wc_.side)
                                          : c.campaign.centers;
    for (const WegnerCenter& wcent : centers_) {
      const std::span<const double> x(wcent.center.data(), static_cast<std::size_t>(wc_.model.dim));
      const Cube cube = build_domain(wc_.model.dim, x, wc_.side, 1.0, Boundary::Dirichlet).cube();
      far_.push_back(satisfies_far_region(wc_.model, wc_.reference_energy, cube));
    }
  }

  std::size_t params() const override { return centers_.size() * wc_.etas.size(); }
  bool shared_disorder() const override { return false; }
  std::vector<std::string> columns() const override {
    return {"center_class", "center_norm", "far", "eta", "side", "unknowns", "hit", "trace", "ground", "ground_ok"};
  }

  json compute_prelude() const override {
    json list = json::array();
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      list.push_back({{"label", centers_[i].label},
                      {"center", std::vector<double>(centers_[i].center.begin(),
                                                     centers_[i].center.begin() + wc_.model.dim)},
                      {"far", static_cast<bool>(far_[i])}});
    }
    const double r = far_region_radius(wc_.model, wc_.reference_energy);
    return {{"centers", list}, {"far_region_radius", std::isfinite(r) ? json(r) : json(nullptr)}};
  }

  CellOutput compute(const CellSeed& cell) const override {
    const std::size_t ci = cell.param / wc_.etas.size();
    const double eta = wc_.etas[cell.param % wc_.etas.size()];
    const WegnerCenter& center = centers_[ci];
    const std::size_t unknowns = grid_unknowns(wc_.model.dim, wc_.side, mesh_, wc_.buffer);
    CellOutput out;
    out.values = {center.label, format_number(norm(center.center, wc_.model.dim)), format_flag(far_[ci]),
                  format_number(eta), format_number(wc_.side), format_count(unknowns)};
    if (unknowns > config_.numerics.max_unknowns) {
      out.skipped = true;
      out.notice = budget_notice(unknowns, config_.numerics.max_unknowns);
      out.values.insert(out.values.end(), {"", "", "", ""});
      return out;
    }
    const WegnerSample s = wegner_sample(wc_, center, eta, far_[ci], cell.seed, cell.stream);
    out.values.insert(out.values.end(), {format_flag(s.hit), format_count(s.trace),
                                         format_number(far_[ci] ? s.ground : kNaN), format_flag(s.ground_ok)});
    return out;
  }

  std::vector<WegnerCell> cells_of(const RunTables& run) const {
    const Table& t = run.cells;
    std::vector<WegnerCell> cells;
    for (const auto& [p, rows] : rows_by_param(t)) {
      WegnerCell c;
      c.center_index = p / wc_.etas.size();
      c.center_class = centers_[c.center_index].label;
      c.center = centers_[c.center_index].center;
      c.far = far_[c.center_index];
      c.eta = wc_.etas[p % wc_.etas.size()];
      const std::vector<double> traces = column_values(t, rows, "trace");
      const std::vector<double> hits = column_values(t, rows, "hit");
      const SampleStats s = sample_stats(traces);
      c.trace_mean = traces.empty() ? kNaN : s.mean;
      c.trace_stderr = s.stderr_mean;
      for (double h : hits) c.hits += h == 1.0 ? 1 : 0;
      c.probability = hits.empty() ? kNaN : static_cast<double>(c.hits) / hits.size();
      c.far_min_ground = std::numeric_limits<double>::infinity();
      for (std::size_t i : rows) {
        if (!ok_row(t, i) || !c.far) continue;
        c.far_ground_ok = c.far_ground_ok && t.number(i, "ground_ok") == 1.0;
        c.far_min_ground = std::min(c.far_min_ground, t.number(i, "ground"));
      }
      cells.push_back(c);
    }
    return cells;
  }

  Aggregate aggregate(const RunTables& run) const override {
    const std::vector<WegnerCell> cells = cells_of(run);
    Aggregate a;
    a.table.header = {"center_class", "center_norm", "far", "eta", "L", "realizations", "hits", "prob", "trace_mean",
                      "trace_stderr"};
    const auto by_param = rows_by_param(run.cells);
    std::size_t k = 0;
    for (const auto& [p, rows] : by_param) {
      const WegnerCell& c = cells[k++];
      a.table.rows.push_back({c.center_class, format_number(norm(c.center, wc_.model.dim)), format_flag(c.far),
                              format_number(c.eta), format_number(wc_.side), format_count(ok_count(run.cells, rows)),
                              format_count(c.hits), format_number(c.probability), format_number(c.trace_mean),
                              format_number(c.trace_stderr)});
    }
    std::size_t central = 0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
      if (centers_[i].label == "origin") {
        central = i;
        break;
      }
    }
    std::vector<WegnerCell> central_cells;
    for (const WegnerCell& c : cells) {
      if (c.center_index == central) central_cells.push_back(c);
    }
    const auto fit_json = [](const WegnerFit& f) {
      return json{{"exponent", f.exponent}, {"exponent_se", f.exponent_se}, {"constant", f.constant}, {"points", f.points}};
    };
    try {
      a.summary["trace_fit"] = fit_json(fit_wegner_trace(central_cells, wc_.side, wc_.model.dim));
    } catch (const Error& e) {
      a.summary["trace_fit"] = {{"error", e.what()}};
    }
    try {
      a.summary["probability_fit"] = fit_json(fit_wegner_probability(central_cells, wc_.side, wc_.model.dim));
    } catch (const Error& e) {
      a.summary["probability_fit"] = {{"error", e.what()}};
    }
    const double volume = std::pow(wc_.side, wc_.model.dim);
    const double s = a.summary["trace_fit"].contains("exponent")
                         ? std::clamp(a.summary["trace_fit"]["exponent"].get<double>(), 1e-6, 1.0)
                         : 1.0;
    double q = 0.0;
    for (const WegnerCell& c : cells) {
      if (c.trace_mean > 0.0) q = std::max(q, c.trace_mean / (std::pow(c.eta, s) * volume));
    }
    bool holds = true, far_empty = true;
    for (const WegnerCell& c : cells) {
      const double bound = q * std::pow(c.eta, s) * volume;
      if (c.probability > bound * (1.0 + 1e-12) || c.trace_mean > bound * (1.0 + 1e-12)) holds = false;
      if (c.far && (c.hits > 0 || c.trace_mean > 0.0 || !c.far_ground_ok)) far_empty = false;
    }
    a.summary["central_center"] = centers_.empty() ? json(nullptr) : json(centers_[central].label);
    a.summary["bound_constant"] = q;
    a.summary["bound_exponent"] = s;
    a.summary["bound_holds"] = holds;
    a.summary["far_boxes_empty"] = far_empty;
    return a;
  }

  std::vector<CheckResult> invariants(const RunTables& run) const override {
    const Table& t = run.cells;
    CheckResult far = make_check("far boxes: no spectrum within eta of E and ground >= E'/2");
    std::size_t far_cells = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (!ok_row(t, i) || t.number(i, "far") != 1.0) continue;
      ++far_cells;
      if (t.number(i, "hit") != 0.0 || t.number(i, "trace") != 0.0 || t.number(i, "ground_ok") != 1.0 ||
          !(t.number(i, "ground") >= 0.5 * wc_.reference_energy)) {
        fail(far, row_cell(t, i));
      }
    }
    far.detail = std::to_string(far_cells) + " far-box cells";
    CheckResult hit = make_check("hit implies a non-empty spectral window");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (ok_row(t, i) && t.number(i, "hit") == 1.0 && !(t.number(i, "trace") >= 1.0)) fail(hit, row_cell(t, i));
    }
    const Aggregate a = aggregate(run);
    CheckResult bound = make_check("prob and trace mean <= Q eta^s L^d with s in ]0, 1]", true);
    bound.passed = a.summary.value("bound_holds", false);
    bound.detail = "Q = " + format_number(a.summary["bound_constant"].get<double>()) +
                   ", s = " + format_number(a.summary["bound_exponent"].get<double>());
    return {far, hit, bound};
  }

 private:
  double mesh_;
  WegnerConfig wc_;
  std::vector<WegnerCenter> centers_;
  std::vector<char> far_;
};

// ---------------------------------------------------------------------------

class LocalizeKind : public Kind {
 public:
  explicit LocalizeKind(const ExperimentConfig& c) : Kind(c), mesh_(resolved_mesh(c)) {
    lc_.model = model_spec(c.model);
    lc_.side = c.numerics.side;
    lc_.buffer = c.numerics.buffer;
    lc_.mesh = mesh_;
    lc_.window_fraction = c.numerics.window_fraction;
    lc_.fit = c.numerics.fit;
    lc_.sule_eps = c.numerics.sule_eps;
    lc_.sule_slack = c.numerics.sule_slack;
    lc_.radius = c.numerics.radius;
    lc_.radius_safety = c.numerics.radius_safety;
    lc_.moment_order = c.numerics.moment_order;
    lc_.times = c.campaign.times;
    lc_.keep_vectors = c.output.eigenvectors;
  }

  std::size_t params() const override { return config_.campaign.alphas.size(); }
  std::vector<std::string> columns() const override {
    return {"alpha",       "side",          "unknowns",        "ground",          "window_lower", "window_upper",
            "pairs",       "complete",      "median_mass",     "min_mass",        "sule_failures", "max_center_norm",
            "radius_failures", "max_partition_error", "sup_moment", "worst_excess", "dominated"};
  }

  std::vector<DetailSpec> detail_tables() const override {
    std::vector<DetailSpec> out{{"profiles.csv",
                                 {"alpha", "n", "energy", "c0", "c1", "c2", "center_norm", "m", "C", "residual", "points",
                                  "refused", "localized", "sule_checked", "sule_violations", "sule_worst", "sule_pass",
                                  "partition_error", "predicted_radius", "within_radius"}}};
    if (!lc_.times.empty()) out.push_back({"moments.csv", {"alpha", "t", "moment"}});
    return out;
  }

  CellOutput compute(const CellSeed& cell) const override {
    const double alpha = config_.campaign.alphas[cell.param];
    const std::size_t unknowns = grid_unknowns(lc_.model.dim, lc_.side, mesh_, lc_.buffer);
    CellOutput out;
    out.details.resize(detail_tables().size());
    out.values = {format_number(alpha), format_number(lc_.side), format_count(unknowns)};
    if (unknowns > config_.numerics.max_unknowns) {
      out.skipped = true;
      out.notice = budget_notice(unknowns, config_.numerics.max_unknowns);
      out.values.resize(columns().size());
      return out;
    }
    const LocalizeRealization run = localize_realization(lc_, alpha, cell.seed, cell.stream);
    std::vector<double> masses;
    std::size_t sule_failures = 0, radius_failures = 0;
    double max_center = 0.0, max_partition = 0.0;
    for (std::size_t n = 0; n < run.profiles.size(); ++n) {
      const EigenProfile& p = run.profiles[n];
      if (!p.fit.refused && p.fit.localized) masses.push_back(p.fit.mass);
      const bool sule_pass = !p.fit.refused && p.sule.passed();
      sule_failures += sule_pass ? 0 : 1;
      radius_failures += p.within_radius ? 0 : 1;
      max_center = std::max(max_center, p.center_norm);
      max_partition = std::max(max_partition, p.partition_error);
      out.details[0].push_back({format_number(alpha), format_count(n), format_number(p.energy),
                                std::to_string(p.center[0]), std::to_string(p.center[1]), std::to_string(p.center[2]),
                                format_number(p.center_norm), format_number(p.fit.mass), format_number(p.fit.prefactor),
                                format_number(p.fit.residual), format_count(p.fit.points), format_flag(p.fit.refused),
                                format_flag(p.fit.localized), format_count(p.sule.checked),
                                format_count(p.sule.violations), format_number(p.sule.worst_ratio),
                                format_flag(sule_pass), format_number(p.partition_error),
                                format_number(p.predicted_radius), format_flag(p.within_radius)});
    }
    const double min_mass = masses.empty() ? kNaN : *std::min_element(masses.begin(), masses.end());
    out.values.insert(out.values.end(),
                      {format_number(run.ground_energy), format_number(run.window_lower),
                       format_number(run.window_upper), format_count(run.profiles.size()), format_flag(run.complete),
                       format_number(masses.empty() ? kNaN : median(masses)), format_number(min_mass),
                       format_count(sule_failures), format_number(max_center), format_count(radius_failures),
                       format_number(max_partition)});
    if (run.dynamics) {
      const DynamicsReport& d = *run.dynamics;
      out.values.insert(out.values.end(),
                        {format_number(d.sup_moment), format_number(d.worst_excess), format_flag(d.dominated)});
      for (std::size_t k = 0; k < d.times.size(); ++k) {
        out.details[1].push_back({format_number(alpha), format_number(d.times[k]), format_number(d.moment[k])});
      }
    } else {
      out.values.insert(out.values.end(), {"", "", ""});
    }
    out.vectors = run.vectors;
    return out;
  }

  Aggregate aggregate(const RunTables& run) const override {
    const Table& t = run.cells;
    const Table& prof = run.details.at(0);
    std::map<std::size_t, std::size_t> param_of_cell;
    for (std::size_t i = 0; i < t.rows.size(); ++i) param_of_cell[row_cell(t, i)] = row_param(t, i);
    std::map<std::size_t, std::vector<double>> masses;
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
      const auto it = param_of_cell.find(row_cell(prof, i));
      if (it == param_of_cell.end()) continue;
      if (prof.number(i, "refused") == 0.0 && prof.number(i, "localized") == 1.0) {
        masses[it->second].push_back(prof.number(i, "m"));
      }
    }
    Aggregate a;
    a.table.header = {"alpha",           "realizations",     "pairs",        "median_mass",    "min_mass",
                      "sule_failures",   "max_center_norm",  "radius_failures", "median_sup_moment",
                      "mean_sup_moment", "domination_failures"};
    std::vector<std::pair<double, double>> median_mass, median_sup;
    for (const auto& [p, rows] : rows_by_param(t)) {
      const double alpha = config_.campaign.alphas[p];
      std::size_t pairs = 0, sule = 0, radius = 0, undominated = 0;
      double max_center = 0.0;
      for (std::size_t i : rows) {
        if (!ok_row(t, i)) continue;
        pairs += static_cast<std::size_t>(t.number(i, "pairs"));
        sule += static_cast<std::size_t>(t.number(i, "sule_failures"));
        radius += static_cast<std::size_t>(t.number(i, "radius_failures"));
        max_center = std::max(max_center, t.number(i, "max_center_norm"));
        if (!lc_.times.empty() && t.number(i, "dominated") != 1.0) ++undominated;
      }
      const std::vector<double>& m = masses[p];
      const std::vector<double> sups = column_values(t, rows, "sup_moment");
      const double med_m = m.empty() ? kNaN : median(m);
      const double min_m = m.empty() ? kNaN : *std::min_element(m.begin(), m.end());
      const double med_s = sups.empty() ? kNaN : median(sups);
      const double mean_s = sups.empty() ? kNaN : sample_stats(sups).mean;
      median_mass.emplace_back(alpha, med_m);
      median_sup.emplace_back(alpha, med_s);
      a.table.rows.push_back({format_number(alpha), format_count(ok_count(t, rows)), format_count(pairs),
                              format_number(med_m), format_number(min_m), format_count(sule), format_number(max_center),
                              format_count(radius), format_number(med_s), format_number(mean_s),
                              format_count(undominated)});
    }
    // Mass uniformity relative to the alpha = 0 (or first) median.
    if (!median_mass.empty()) {
      double reference = median_mass.front().second;
      for (const auto& [alpha, m] : median_mass) {
        if (alpha == 0.0) reference = m;
      }
      double lowest = std::numeric_limits<double>::infinity();
      for (const auto& [alpha, m] : median_mass) lowest = std::min(lowest, m);
      a.summary["reference_median_mass"] = reference;
      a.summary["min_median_mass"] = lowest;
      a.summary["mass_uniform"] = lowest >= 0.5 * reference;
    }
    if (!lc_.times.empty() && !median_sup.empty()) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& [alpha, s] : median_sup) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      a.summary["sup_moment_ratio"] = lo > 0.0 ? json(hi / lo) : json(nullptr);
      a.summary["sup_moment_uniform"] = lo > 0.0 && hi <= 3.0 * lo;
    }
    return a;
  }

  std::vector<CheckResult> invariants(const RunTables& run) const override {
    const Table& t = run.cells;
    const Table& prof = run.details.at(0);
    std::vector<CheckResult> out;
    CheckResult partition = make_check("cube masses partition the norm (|sum - 1| <= 1e-10)");
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
      if (!(prof.number(i, "partition_error") <= 1e-10)) fail(partition, row_cell(prof, i));
    }
    out.push_back(partition);
    CheckResult complete = make_check("eigenbasis complete in every window");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (ok_row(t, i) && t.number(i, "complete") != 1.0) fail(complete, row_cell(t, i));
    }
    out.push_back(complete);
    if (!lc_.times.empty()) {
      CheckResult dom = make_check("correlator dominates |chi_x U(t) P psi0| at every sampled (x, t)");
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (ok_row(t, i) && t.number(i, "dominated") != 1.0) fail(dom, row_cell(t, i));
      }
      out.push_back(dom);
      CheckResult nonneg = make_check("M_p(t) >= 0 and finite");
      for (std::size_t i = 0; i < run.details.at(1).rows.size(); ++i) {
        const double m = run.details[1].number(i, "moment");
        if (!(m >= 0.0 && std::isfinite(m))) fail(nonneg, row_cell(run.details[1], i));
      }
      out.push_back(nonneg);
    }
    CheckResult sule = make_check("SULE bound with slack on every fitted eigenfunction", true);
    CheckResult radius = make_check("centres within the safety factor of the predicted radius", true);
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
      if (prof.number(i, "sule_pass") != 1.0) fail(sule, row_cell(prof, i));
      if (prof.number(i, "within_radius") != 1.0) fail(radius, row_cell(prof, i));
    }
    sule.detail = std::to_string(sule.cells.size()) + " cells with a failing eigenfunction";
    out.push_back(sule);
    out.push_back(radius);
    const Aggregate a = aggregate(run);
    CheckResult mass = make_check("min median mass >= 0.5 x reference median", true);
    mass.passed = a.summary.value("mass_uniform", false);
    out.push_back(mass);
    if (!lc_.times.empty()) {
      CheckResult sup = make_check("median sup M_p within a factor 3 across alpha", true);
      sup.passed = a.summary.value("sup_moment_uniform", false);
      if (a.summary.contains("sup_moment_ratio") && a.summary["sup_moment_ratio"].is_number()) {
        sup.detail = "max/min median = " + format_number(a.summary["sup_moment_ratio"].get<double>());
      }
      out.push_back(sup);
    }
    return out;
  }

 private:
  double mesh_;
  LocalizeConfig lc_;
};

}  // namespace

std::unique_ptr<Kind> make_kind(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::Ids:
      return std::make_unique<IdsKind>(config);
    case ExperimentKind::E0:
      return std::make_unique<E0Kind>(config);
    case ExperimentKind::CountVsAlpha:
      return std::make_unique<CountVsAlphaKind>(config);
    case ExperimentKind::Trial:
      return std::make_unique<TrialKind>(config, false);
    case ExperimentKind::Growth:
      return std::make_unique<TrialKind>(config, true);
    case ExperimentKind::Wegner:
      return std::make_unique<WegnerKind>(config);
    case ExperimentKind::Localize:
    case ExperimentKind::Dynamics:
      return std::make_unique<LocalizeKind>(config);
  }
  throw PreconditionError("unknown experiment kind");
}

}  // namespace decaylab::harness::detail
