#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "decaylab/error.hpp"
#include "decaylab/ids.hpp"

using namespace decaylab;

namespace {

ModelSpec ergodic_chain(double coupling, Distribution dist = Distribution::uniform01(), double u0 = 1.0) {
  ModelSpec m;
  m.dim = 1;
  m.coupling = coupling;
  m.single_site = SingleSitePotential::cube(u0, 1.0);
  m.distribution = std::move(dist);
  return m;
}

}  // namespace

TEST(EstimateIds, FreeOperatorHasNoStatesBelowZero) {
  const std::vector<double> grid{-2.0, -1.0, -0.1, -1e-6};
  const auto est = estimate_ids(ergodic_chain(4.0, Distribution::bernoulli(0.0)), grid, 32.0, Boundary::Neumann, 3, 5);
  for (double v : est.mean) EXPECT_EQ(v, 0.0);
  for (double v : est.stderr_mean) EXPECT_EQ(v, 0.0);
}

TEST(EstimateIds, MonotoneInEnergyAndBracketedByBoundary) {
  const std::vector<double> grid{-3.0, -2.0, -1.0, -0.5, -0.1};
  const auto model = ergodic_chain(4.0);
  double previous_gap = std::numeric_limits<double>::infinity();
  for (double side : {32.0, 64.0, 128.0}) {
    const auto d = estimate_ids(model, grid, side, Boundary::Dirichlet, 20, 11);
    const auto n = estimate_ids(model, grid, side, Boundary::Neumann, 20, 11);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (k > 0) {
        EXPECT_GE(d.mean[k], d.mean[k - 1]);
        EXPECT_GE(n.mean[k], n.mean[k - 1]);
      }
      for (std::size_t r = 0; r < d.counts.size(); ++r) EXPECT_LE(d.counts[r][k], n.counts[r][k]);
    }
    const double gap = n.mean[3] - d.mean[3];
    EXPECT_GE(gap, 0.0);
    EXPECT_LE(gap, previous_gap + 1e-12) << "side " << side;
    previous_gap = gap;
  }
}

TEST(EstimateIds, StandardErrorScalesWithRealizations) {
  const std::vector<double> grid{-0.5};
  const auto model = ergodic_chain(4.0);
  const auto small = estimate_ids(model, grid, 16.0, Boundary::Dirichlet, 200, 3);
  const auto large = estimate_ids(model, grid, 16.0, Boundary::Dirichlet, 800, 3);
  const double ratio = large.stderr_mean[0] / small.stderr_mean[0];
  EXPECT_NEAR(ratio, 0.5, 0.15);
}

TEST(EstimateIds, RejectsBadInput) {
  const std::vector<double> positive{0.5};
  EXPECT_THROW(estimate_ids(ergodic_chain(1.0), positive, 16.0, Boundary::Dirichlet, 2, 0), PreconditionError);
  const std::vector<double> ok{-0.5};
  EXPECT_THROW(estimate_ids(ergodic_chain(1.0), ok, 16.0, Boundary::Dirichlet, 0, 0), PreconditionError);
  ModelSpec decaying = ergodic_chain(1.0);
  decaying.envelope = Envelope::power_law(1.0);
  EXPECT_THROW(estimate_ids(decaying, ok, 16.0, Boundary::Dirichlet, 2, 0), PreconditionError);
}

TEST(EstimateE0, ConstantPotentialSitsAtTheBound) {
  const auto est = estimate_E0(ergodic_chain(3.0, Distribution::bernoulli(1.0), 2.0), 32.0, 3, 1);
  EXPECT_EQ(est.lower_bound, -6.0);
  EXPECT_GE(est.e0, -6.0 - 1e-9);
  EXPECT_LE(est.e0, -6.0 + 1e-6);
}

TEST(EstimateE0, VanishingCouplingApproachesZeroFromBelow) {
  const auto est = estimate_E0(ergodic_chain(1e-4), 32.0, 5, 2);
  EXPECT_LT(est.e0, 0.0);
  EXPECT_GT(est.e0, -1e-4);
}

TEST(EstimateE0, LargerBoxesReachLower) {
  // Neumann ground energies are not domain monotone; only the trend over a wide range is checked.
  const auto model = ergodic_chain(4.0);
  const auto small = estimate_E0(model, 16.0, 20, 9);
  const auto large = estimate_E0(model, 256.0, 20, 9);
  EXPECT_LT(large.e0, small.e0);
  EXPECT_GE(large.e0, large.lower_bound);
  EXPECT_GE(small.e0, small.lower_bound);
}

TEST(Nu0, CoveringPotentialGivesEnergyRatio) {
  const auto model = ergodic_chain(4.0, Distribution::bernoulli(1.0));
  const auto est = nu0(model, -0.5, 1e-6, 16.0, 2, 0);
  EXPECT_NEAR(est.nu0, 0.5 / 4.0, 1e-5);
}

TEST(Nu0, LimitsOfTheDefinition) {
  const auto model = ergodic_chain(4.0, Distribution::bernoulli(1.0));
  EXPECT_GT(nu0(model, -3.999, 1e-6, 16.0, 2, 0).nu0, 0.999);
  EXPECT_LT(nu0(model, -1e-3, 1e-6, 16.0, 2, 0).nu0, 1e-3);
  EXPECT_THROW(nu0(model, -4.5, 1e-6, 16.0, 2, 0), PreconditionError);
}

TEST(CountingBounds, DirectEvaluation) {
  const auto a = counting_bounds(1, 2.0, 0.5, 0.01, 1.0, -0.5, 0.2, 0.3, 1.0);
  EXPECT_NEAR(a.inner_side, 2.0, 1e-12);
  const auto b = counting_bounds(1, 1.0, 0.5, 0.01, 1.0, -0.5, 0.2, 0.3, 1.0);
  EXPECT_NEAR(b.outer_side, 4.0, 1e-12);
  EXPECT_NEAR(b.upper, 4.0 * 0.31, 1e-12);
}

TEST(CountingBounds, VacuousLowerBoundClampsToZero) {
  const auto b = counting_bounds(1, 1.0, 0.5, 0.3, 1.0, -0.5, 0.2, 0.3, 1.0);
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_THROW(counting_bounds(1, 1.0, 1.0, 0.3, 1.0, -0.5, 0.2, 0.3, 1.0), PreconditionError);
  EXPECT_THROW(counting_bounds(1, 0.0, 0.5, 0.3, 1.0, -0.5, 0.2, 0.3, 1.0), PreconditionError);
}
