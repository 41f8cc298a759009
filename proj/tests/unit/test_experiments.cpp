#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "decaylab/disorder.hpp"
#include "decaylab/error.hpp"
#include "decaylab/experiments.hpp"

using namespace decaylab;

namespace {

ModelSpec chain_model(double coupling, Distribution dist = Distribution::uniform01()) {
  ModelSpec m;
  m.dim = 1;
  m.coupling = coupling;
  m.distribution = std::move(dist);
  return m;
}

Envelope witness_envelope(double alpha, double exponent, double r0) {
  GeneralEnvelope g;
  g.gamma = [alpha](const Point& x, int dim) { return std::pow(japanese_bracket(x, dim), -alpha); };
  g.witness = [exponent](double r) { return std::pow(r, exponent); };
  g.r0 = r0;
  g.description = "test witness";
  return Envelope::general(std::move(g));
}

std::size_t dense_count(const Eigen::MatrixXd& h, double energy) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) n += eig.eigenvalues()[i] < energy ? 1 : 0;
  return n;
}

/// Potential rebuilt from the single-site bumps, independent of the assembly code.
Eigen::VectorXd oracle_potential(const ModelSpec& model, const LatticeDomain& dom, std::uint64_t seed,
                                 std::uint32_t realization, bool origin_only) {
  const DisorderSpec spec{model.distribution, seed, realization};
  Eigen::VectorXd v(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const Point x = dom.coordinate(i);
    const auto base = static_cast<std::int64_t>(std::floor(x[0]));
    double sum = 0.0;
    for (std::int64_t j = base - 1; j <= base + 1; ++j) {
      if (origin_only && j != 0) continue;
      Point offset{x[0] - static_cast<double>(j), 0.0, 0.0};
      sum += sample_site(spec, Site{j, 0, 0}) * model.single_site.value(offset, 1);
    }
    v[static_cast<Eigen::Index>(i)] = -model.coupling * model.envelope.value(x, 1) * sum;
  }
  return v;
}

}  // namespace

TEST(CountForAlpha, NoPotentialNoBoundStates) {
  for (double alpha : {0.3, 0.5, 1.0, 2.0}) {
    EXPECT_EQ(count_for_alpha(chain_model(0.0), alpha, -0.5, BoxConfig{}, 1, 0).count, 0u);
  }
}

TEST(CountForAlpha, SteepEnvelopeMatchesOriginCellOracle) {
  ModelSpec model = chain_model(4.0);
  model.envelope = Envelope::power_law(10.0);
  const LatticeDomain dom = build_domain(1, 24.0, default_mesh(1), Boundary::Dirichlet);
  const Eigen::MatrixXd lap = Eigen::MatrixXd(discrete_laplacian(dom));
  for (std::uint32_t r = 0; r < 10; ++r) {
    const Eigen::MatrixXd h = lap + Eigen::MatrixXd(oracle_potential(model, dom, 3, r, true).asDiagonal());
    EXPECT_EQ(count_for_alpha(model, 10.0, -0.5, BoxConfig{}, 3, r).count, dense_count(h, -0.5)) << "realization " << r;
  }
}

TEST(CountForAlpha, BoxSideFollowsEnergyScale) {
  const ModelSpec model = chain_model(4.0);
  BoxConfig box;
  box.floor_side = 2.0;
  EXPECT_EQ(alpha_box_side(model, 1.0, -0.5, box), 16.0);
  EXPECT_EQ(alpha_box_side(model, 0.5, -0.5, box), 128.0);
}

TEST(CountVsAlpha, CountsNonIncreasingInAlphaPerRealization) {
  CountVsAlphaConfig cfg;
  cfg.model = chain_model(4.0);
  cfg.alphas = {0.5, 0.6, 0.8, 1.0, 1.5};
  cfg.realizations = 8;
  cfg.seed = 17;
  const auto rec = count_vs_alpha(cfg);
  ASSERT_EQ(rec.cells.size(), cfg.alphas.size());
  for (std::size_t r = 0; r < cfg.realizations; ++r) {
    for (std::size_t k = 1; k < rec.cells.size(); ++k) {
      EXPECT_LE(rec.cells[k].counts[r], rec.cells[k - 1].counts[r]);
    }
  }
  EXPECT_NEAR(rec.band_hi, std::log(8.0), 1e-12);
}

TEST(CountVsAlpha, BudgetSkipsWithNotice) {
  CountVsAlphaConfig cfg;
  cfg.model = chain_model(4.0);
  cfg.alphas = {1.0, 0.1};
  cfg.realizations = 2;
  cfg.box.max_unknowns = 5000;
  const auto rec = count_vs_alpha(cfg);
  EXPECT_FALSE(rec.cells[0].skipped);
  EXPECT_TRUE(rec.cells[1].skipped);
  EXPECT_FALSE(rec.cells[1].notice.empty());
}

TEST(TrialLayout, PlateauFunctionsAreNormalizedAndDisjoint) {
  const auto layout = trial_layout(1, 128.0, 0.25, [](double r) { return std::sqrt(r); }, 2.0);
  ASSERT_FALSE(layout.functions.empty());
  for (std::size_t a = 0; a < layout.functions.size(); ++a) {
    EXPECT_NEAR(layout.functions[a].norm(), 1.0, 1e-10);
    for (std::size_t b = a + 1; b < layout.functions.size(); ++b) {
      EXPECT_EQ(layout.functions[a].cwiseProduct(layout.functions[b]).cwiseAbs().maxCoeff(), 0.0);
    }
  }
  EXPECT_NEAR(layout.kappa, layout.functions.size() / std::pow(layout.witness_at_side, 0.25), 1e-12);
  EXPECT_LE(layout.cube_side, layout.nominal_side);
}

TEST(TrialRealization, ZeroDisorderQuotientsAreKineticEnergy) {
  ModelSpec model = chain_model(8.0, Distribution::bernoulli(0.0));
  model.envelope = witness_envelope(1.0, 0.5, 2.0);
  const auto layout = trial_layout(1, 64.0, 0.25, [](double r) { return std::sqrt(r); }, 2.0);
  const auto run = trial_realization(model, layout, 0.25, 1, 0);
  const LatticeDomain dom = build_domain(1, 64.0, 0.25, Boundary::Dirichlet);
  const SparseMatrix lap = discrete_laplacian(dom);
  for (std::size_t n = 0; n < layout.functions.size(); ++n) {
    const auto& v = layout.functions[n];
    EXPECT_GT(run.quotients[n], 0.0);
    EXPECT_NEAR(run.quotients[n], v.dot(lap * v), 1e-10);
  }
  EXPECT_FALSE(run.certified);
}

TEST(TrialRealization, QuotientsMatchQuadraticFormOracle) {
  ModelSpec model = chain_model(8.0);
  model.envelope = witness_envelope(1.0, 0.5, 2.0);
  const auto layout = trial_layout(1, 64.0, 0.25, [](double r) { return std::sqrt(r); }, 2.0);
  const LatticeDomain dom = build_domain(1, 64.0, 0.25, Boundary::Dirichlet);
  const SparseMatrix lap = discrete_laplacian(dom);
  for (std::uint32_t r = 0; r < 3; ++r) {
    const auto run = trial_realization(model, layout, 0.25, 5, r);
    const Eigen::VectorXd pot = oracle_potential(model, dom, 5, r, false);
    for (std::size_t n = 0; n < layout.functions.size(); ++n) {
      const auto& v = layout.functions[n];
      const double expected = v.dot(lap * v) + (pot.array() * v.array().square()).sum();
      EXPECT_NEAR(run.quotients[n], expected, 1e-9 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST(TrialCertificate, CertifiedRealizationsAreSound) {
  TrialConfig cfg;
  cfg.model = chain_model(8.0);
  cfg.model.envelope = witness_envelope(1.0, 0.5, 2.0);
  cfg.sides = {64.0, 128.0};
  cfg.realizations = 12;
  cfg.seed = 4;
  const auto rec = trial_certificate(cfg);
  std::size_t certified = 0;
  for (const auto& side : rec.sides) {
    EXPECT_EQ(side.violations, 0u);
    for (const auto& run : side.runs) {
      if (!run.certified) continue;
      ++certified;
      EXPECT_GE(run.count, side.layout.functions.size());
    }
  }
  EXPECT_GT(certified, 0u);
}

TEST(TrialCertificate, RejectsMissingWitnessAndBadMu) {
  TrialConfig cfg;
  cfg.model = chain_model(8.0);
  cfg.sides = {64.0};
  EXPECT_THROW(trial_certificate(cfg), PreconditionError);
  cfg.model.envelope = witness_envelope(1.0, 0.5, 2.0);
  cfg.mu = 0.75;
  EXPECT_THROW(trial_certificate(cfg), PreconditionError);
}

TEST(InfinitudeGrowth, CountsGrowOnNestedBoxes) {
  TrialConfig cfg;
  cfg.model = chain_model(8.0);
  cfg.model.envelope = witness_envelope(1.0, 0.5, 2.0);
  cfg.sides = {32.0, 64.0, 128.0};
  cfg.realizations = 6;
  const auto rec = infinitude_growth(cfg);
  EXPECT_TRUE(rec.nested_monotone);
  EXPECT_GT(rec.rows.back().mean_count, rec.rows.front().mean_count);
}

TEST(InfinitudeGrowth, RefusesWitnessBeyondSquareDecay) {
  TrialConfig cfg;
  cfg.model = chain_model(8.0);
  cfg.model.envelope = witness_envelope(3.0, 2.5, 2.0);
  cfg.sides = {32.0};
  cfg.realizations = 1;
  EXPECT_THROW(infinitude_growth(cfg), PreconditionError);
}

TEST(Wegner, Validation) {
  WegnerConfig cfg;
  cfg.model = chain_model(4.0);
  cfg.model.envelope = Envelope::power_law(1.0);
  cfg.reference_energy = -1.0;
  cfg.energy = -1.0;
  cfg.etas = {0.1, 0.25};
  EXPECT_NO_THROW(validate_wegner(cfg));
  cfg.etas = {0.3};
  EXPECT_THROW(validate_wegner(cfg), PreconditionError);
  cfg.etas = {0.1};
  cfg.energy = -0.5;
  EXPECT_THROW(validate_wegner(cfg), PreconditionError);
  cfg.energy = -1.0;
  cfg.model.distribution = Distribution::bernoulli(0.5);
  EXPECT_THROW(validate_wegner(cfg), PreconditionError);
}

TEST(Wegner, FarBoxesAreEmptyAndProbabilitiesBounded) {
  WegnerConfig cfg;
  cfg.model = chain_model(4.0);
  cfg.model.envelope = Envelope::power_law(1.0);
  cfg.reference_energy = -1.0;
  cfg.energy = -1.0;
  cfg.etas = {0.01, 0.1, 0.25};
  cfg.side = 32.0;
  cfg.realizations = 20;
  const auto rec = wegner_scan(cfg);
  EXPECT_TRUE(rec.far_boxes_empty);
  for (const auto& cell : rec.cells) {
    EXPECT_GE(cell.probability, 0.0);
    EXPECT_LE(cell.probability, 1.0);
    EXPECT_GE(cell.trace_mean, 0.0);
    if (cell.far) {
      EXPECT_EQ(cell.hits, 0u);
      EXPECT_TRUE(cell.far_ground_ok);
    }
  }
}
