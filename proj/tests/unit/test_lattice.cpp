#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "decaylab/envelope.hpp"
#include "decaylab/error.hpp"
#include "decaylab/lattice.hpp"
#include "decaylab/single_site.hpp"

using namespace decaylab;

TEST(BuildDomain, ChainOfFourPoints) {
  const auto d = build_domain(1, 4.0, 1.0, Boundary::Dirichlet);
  EXPECT_EQ(d.size(), 4u);
  EXPECT_EQ(d.shape()[0], 4);
  EXPECT_DOUBLE_EQ(d.coordinate(std::size_t{0})[0], -1.5);
  EXPECT_DOUBLE_EQ(d.coordinate(std::size_t{3})[0], 1.5);
}

TEST(BuildDomain, NeumannSquareOfNinePoints) {
  const auto d = build_domain(2, 3.0, 1.0, Boundary::Neumann);
  EXPECT_EQ(d.size(), 9u);
  EXPECT_EQ(d.boundary(), Boundary::Neumann);
}

TEST(BuildDomain, RejectsNonIntegralRatio) {
  EXPECT_THROW(build_domain(1, 4.0, 0.3, Boundary::Dirichlet), PreconditionError);
}

TEST(BuildDomain, RejectsBadDimensionAndSizes) {
  EXPECT_THROW(build_domain(0, 4.0, 1.0, Boundary::Dirichlet), PreconditionError);
  EXPECT_THROW(build_domain(4, 4.0, 1.0, Boundary::Dirichlet), PreconditionError);
  EXPECT_THROW(build_domain(1, -4.0, 1.0, Boundary::Dirichlet), PreconditionError);
  EXPECT_THROW(build_domain(1, 4.0, 0.0, Boundary::Dirichlet), PreconditionError);
}

TEST(BuildDomain, IndexRoundTripIsIdentity) {
  const std::vector<double> center{0.5, -1.0, 2.0};
  for (int dim = 1; dim <= 3; ++dim) {
    const auto d = build_domain(dim, std::span<const double>(center.data(), static_cast<std::size_t>(dim)), 3.0, 0.5, Boundary::Dirichlet);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto node = d.node(i);
      ASSERT_EQ(d.index(node), i);
      const Point x = d.coordinate(i);
      for (int k = 0; k < dim; ++k) {
        const double back = (x[k] - (center[k] - 1.5)) / 0.5 - 0.5;
        ASSERT_NEAR(back, static_cast<double>(node[k]), 1e-12);
      }
    }
  }
}

TEST(BuildDomain, BufferKeepsCentreAndMesh) {
  const auto d = build_domain(2, 4.0, 0.25, Boundary::Neumann);
  const auto big = d.with_buffer(8.0);
  EXPECT_DOUBLE_EQ(big.side(), 20.0);
  EXPECT_EQ(big.boundary(), Boundary::Dirichlet);
  EXPECT_EQ(big.size(), 80u * 80u);
}

TEST(Envelope, SpecExamples) {
  const auto e1 = Envelope::power_law(1.0);
  EXPECT_DOUBLE_EQ(e1.value(Point{0, 0, 0}, 3), 1.0);
  EXPECT_DOUBLE_EQ(envelope_value(e1, Point{1, 1, 1}, 3), 0.5);
  const auto e0 = Envelope::power_law(0.0);
  EXPECT_EQ(e0.value(Point{123.0, -7.0, 0}, 2), 1.0);
  EXPECT_DOUBLE_EQ(Envelope::power_law(3.7).value(Point{}, 1), 1.0);
}

TEST(Envelope, StrictlyDecreasingInAlphaAndRadius) {
  const Point x{1.3, -0.4, 0.0};
  double prev = 2.0;
  for (double a = 0.0; a <= 2.0; a += 0.125) {
    const double v = Envelope::power_law(a).value(x, 2);
    EXPECT_LT(v, prev);
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
  const auto e = Envelope::power_law(0.7);
  prev = 2.0;
  for (double r = 0.0; r < 50.0; r += 0.5) {
    const double v = e.value(Point{r, 0, 0}, 1);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Envelope, WitnessViolationNamesThePoint) {
  GeneralEnvelope g;
  g.gamma = [](const Point& x, int dim) { return std::pow(japanese_bracket(x, dim), -3.0); };
  g.witness = [](double r) { return std::sqrt(r); };
  g.r0 = 1.0;
  const auto env = Envelope::general(g);
  const auto domain = build_domain(1, 64.0, 0.25, Boundary::Dirichlet);
  try {
    env.check_witness(domain);
    FAIL() << "expected rejection";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("x = ("), std::string::npos) << e.what();
  }
}

TEST(Envelope, WitnessAdmissibility) {
  EXPECT_EQ(witness_admissibility([](double r) { return std::sqrt(r); }, 1.0, 1e4), "");
  EXPECT_NE(witness_admissibility([](double r) { return r * r * r; }, 1.0, 1e4), "");
  EXPECT_NE(witness_admissibility([](double) { return 1.0; }, 1.0, 1e4), "");
}

TEST(SingleSite, CubeIndicator) {
  const auto u = SingleSitePotential::cube(2.0, 0.5);
  EXPECT_DOUBLE_EQ(u.value(Point{0.2, 0, 0}, 1), 2.0);
  EXPECT_DOUBLE_EQ(u.value(Point{0.3, 0, 0}, 1), 0.0);
  EXPECT_DOUBLE_EQ(u.integral(1), 1.0);
  EXPECT_DOUBLE_EQ(u.integral(2), 0.5);
  EXPECT_DOUBLE_EQ(SingleSitePotential::cube(3.0).periodized_sup(), 3.0);
}

TEST(SingleSite, TabulatedIntegralAndBounds) {
  const auto u = SingleSitePotential::tabulated(1, 4, {0.0, 1.0, 2.0, 1.0});
  EXPECT_DOUBLE_EQ(u.sup(), 2.0);
  EXPECT_DOUBLE_EQ(u.integral(1), 1.0);
  EXPECT_DOUBLE_EQ(u.value(Point{-0.5, 0, 0}, 1), 0.0);
  EXPECT_DOUBLE_EQ(u.value(Point{0.1, 0, 0}, 1), 2.0);
}
