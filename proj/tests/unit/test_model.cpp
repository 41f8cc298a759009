#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "decaylab/disorder.hpp"
#include "decaylab/error.hpp"
#include "decaylab/hamiltonian.hpp"
#include "decaylab/rng.hpp"

using namespace decaylab;

namespace {

Eigen::MatrixXd dense(const HamiltonianMatrix& h) { return Eigen::MatrixXd(h.matrix()); }

ModelSpec model_1d(double alpha, double coupling, Distribution dist = Distribution::uniform01()) {
  ModelSpec m;
  m.dim = 1;
  m.coupling = coupling;
  m.envelope = Envelope::power_law(alpha);
  m.distribution = std::move(dist);
  return m;
}

}  // namespace

TEST(Philox, KnownAnswerVector) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Disorder, DegenerateBernoulli) {
  SiteBox box{1, {-20, 0, 0}, {41, 1, 1}};
  const auto ones = sample_disorder({Distribution::bernoulli(1.0), 7, 0}, box);
  const auto zeros = sample_disorder({Distribution::bernoulli(0.0), 7, 0}, box);
  for (double w : ones.values()) EXPECT_EQ(w, 1.0);
  for (double w : zeros.values()) EXPECT_EQ(w, 0.0);
}

TEST(Disorder, UniformMeanWithinThreeSigma) {
  SiteBox box{1, {0, 0, 0}, {1000000, 1, 1}};
  const auto f = sample_disorder({Distribution::uniform01(), 20240601, 3}, box);
  double sum = 0.0;
  for (double w : f.values()) {
    ASSERT_GE(w, 0.0);
    ASSERT_LT(w, 1.0);
    sum += w;
  }
  const double mean = sum / 1e6;
  const double sigma = 1.0 / std::sqrt(12.0 * 1e6);
  EXPECT_LT(std::abs(mean - 0.5), 3.0 * sigma);
}

TEST(Disorder, SamplingIsOrderIndependent) {
  const DisorderSpec spec{Distribution::uniform01(), 99, 5};
  SiteBox big{2, {-5, -5, 0}, {11, 11, 1}};
  SiteBox small{2, {1, -2, 0}, {3, 2, 1}};
  const auto a = sample_disorder(spec, big);
  const auto b = sample_disorder(spec, small);
  for (std::size_t i = 0; i < small.size(); ++i) {
    const Site s = small.site(i);
    EXPECT_EQ(a.at(s), b.at(s));
    EXPECT_EQ(sample_site(spec, s), b.at(s));
  }
  const DisorderSpec other{Distribution::uniform01(), 99, 6};
  EXPECT_NE(sample_site(spec, Site{0, 0, 0}), sample_site(other, Site{0, 0, 0}));
  EXPECT_THROW(b.at(Site{10, 10, 0}), PreconditionError);
}

TEST(Disorder, BoundedDensityMeanAndSupport) {
  const auto dist = Distribution::bounded_density({1.0, 3.0});
  EXPECT_NEAR(dist.mean(), 0.25 * 0.25 + 0.75 * 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(*dist.density_sup(), 1.5);
  EXPECT_FALSE(Distribution::bernoulli(0.3).density_sup().has_value());
  SiteBox box{1, {0, 0, 0}, {200000, 1, 1}};
  const auto f = sample_disorder({dist, 1, 0}, box);
  double sum = 0.0;
  for (double w : f.values()) {
    ASSERT_GE(w, 0.0);
    ASSERT_LE(w, 1.0);
    sum += w;
  }
  EXPECT_NEAR(sum / 2e5, dist.mean(), 5e-3);
}

TEST(Hamiltonian, FreeChainHasSineTransformSpectrum) {
  const auto d = build_domain(1, 4.0, 1.0, Boundary::Dirichlet);
  const auto field = sample_disorder({Distribution::bernoulli(0.0), 0, 0}, sites_covering(d));
  const auto h = assemble_hamiltonian({}, d, field, SingleSitePotential::cube(1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(h));
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(es.eigenvalues()[k - 1], 2.0 - 2.0 * std::cos(k * std::numbers::pi / 5.0), 1e-12);
  }
  EXPECT_EQ((dense(h) - Eigen::MatrixXd(discrete_laplacian(d))).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, FullCouplingShiftsDiagonal) {
  const auto d = build_domain(2, 6.0, 0.5, Boundary::Dirichlet);
  ModelParams p;
  p.envelope = Envelope::power_law(0.0);
  p.coupling = 1.0;
  const auto field = sample_disorder({Distribution::bernoulli(1.0), 0, 0}, sites_covering(d));
  const auto h = assemble_hamiltonian(p, d, field, SingleSitePotential::cube(1.0));
  const double kinetic = 4.0 / 0.25;
  const Eigen::MatrixXd m = dense(h);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_DOUBLE_EQ(m(i, i), kinetic - 1.0);
}

TEST(Hamiltonian, StructuralInvariants) {
  for (int dim = 1; dim <= 3; ++dim) {
    const double mesh = dim == 3 ? 0.5 : 0.25;
    const auto box = build_domain(dim, 4.0, mesh, dim == 2 ? Boundary::Neumann : Boundary::Dirichlet);
    ModelSpec m;
    m.dim = dim;
    m.coupling = 3.0;
    m.envelope = Envelope::power_law(0.5);
    const auto h = restricted_operator(m, box, 11, 2);
    const Eigen::MatrixXd a = dense(h);
    EXPECT_EQ((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0);
    const double offd = -1.0 / (mesh * mesh);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      EXPECT_GE(a(i, i), -3.0 * 1.0);
      if (box.boundary() == Boundary::Dirichlet) EXPECT_GE(a(i, i), 2.0 * dim / (mesh * mesh) - 3.0);
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (i == j) continue;
        const auto ni = box.node(static_cast<std::size_t>(i));
        const auto nj = box.node(static_cast<std::size_t>(j));
        std::int64_t manhattan = 0;
        for (int k = 0; k < dim; ++k) manhattan += std::abs(ni[k] - nj[k]);
        ASSERT_EQ(a(i, j), manhattan == 1 ? offd : 0.0);
      }
    }
    for (double v : h.potential()) {
      EXPECT_LE(v, 0.0);
      EXPECT_GE(v, -3.0);
    }
  }
}

TEST(Hamiltonian, AssemblyIsBitIdentical) {
  const auto box = build_domain(2, 8.0, 0.25, Boundary::Dirichlet);
  ModelSpec m;
  m.dim = 2;
  m.coupling = 2.0;
  m.envelope = Envelope::power_law(0.3);
  const auto a = embedded_operator(m, box, 2.0, ImpurityRule::RestrictToBox, 5, 9);
  const auto b = embedded_operator(m, box, 2.0, ImpurityRule::RestrictToBox, 5, 9);
  ASSERT_EQ(a.matrix().nonZeros(), b.matrix().nonZeros());
  EXPECT_EQ(std::memcmp(a.matrix().valuePtr(), b.matrix().valuePtr(), sizeof(double) * a.matrix().nonZeros()), 0);
}

TEST(Hamiltonian, AlphaZeroEqualsConstantEnvelope) {
  const auto d = build_domain(1, 32.0, 0.25, Boundary::Neumann);
  const auto field = sample_disorder({Distribution::uniform01(), 3, 1}, sites_covering(d));
  ModelParams p0{Envelope::power_law(0.0), 4.0, std::nullopt};
  ModelParams p1{Envelope::constant_one(), 4.0, std::nullopt};
  const auto u = SingleSitePotential::cube(1.0);
  EXPECT_EQ((dense(assemble_hamiltonian(p0, d, field, u)) - dense(assemble_hamiltonian(p1, d, field, u)))
                .cwiseAbs()
                .maxCoeff(),
            0.0);
}

TEST(Hamiltonian, OperatorMonotoneInAlpha) {
  const auto d = build_domain(2, 6.0, 0.25, Boundary::Dirichlet);
  const auto field = sample_disorder({Distribution::uniform01(), 17, 0}, sites_covering(d));
  const auto u = SingleSitePotential::cube(1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (double a = 0.0; a < 2.0; a += 0.25) {
    const auto lo = assemble_hamiltonian({Envelope::power_law(a), 5.0, std::nullopt}, d, field, u);
    const auto hi = assemble_hamiltonian({Envelope::power_law(a + 0.25), 5.0, std::nullopt}, d, field, u);
    const SparseMatrix diff = hi.matrix() - lo.matrix();
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
      for (auto& x : v) x = g(rng);
      EXPECT_GE(v.dot(diff * v), 0.0);
    }
  }
}

TEST(Hamiltonian, MissingSitesRejected) {
  const auto d = build_domain(1, 8.0, 0.5, Boundary::Dirichlet);
  const auto field = sample_disorder({Distribution::uniform01(), 0, 0}, SiteBox{1, {0, 0, 0}, {2, 1, 1}});
  EXPECT_THROW(assemble_hamiltonian({}, d, field, SingleSitePotential::cube(1.0)), PreconditionError);
}

TEST(Hamiltonian, GroundEnergyStableUnderRefinement) {
  const auto field_box = build_domain(1, 6.0, 0.25, Boundary::Dirichlet);
  const auto field = sample_disorder({Distribution::bernoulli(1.0), 0, 0}, sites_covering(field_box));
  const auto u = SingleSitePotential::cube(1.0);
  const ModelParams p{Envelope::power_law(0.0), 2.0, std::nullopt};
  const auto coarse = assemble_hamiltonian(p, build_domain(1, 6.0, 0.25, Boundary::Dirichlet), field, u);
  const auto fine = assemble_hamiltonian(p, build_domain(1, 6.0, 0.125, Boundary::Dirichlet), field, u);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(dense(coarse));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(dense(fine));
  const double e1 = ec.eigenvalues()[0];
  const double e2 = ef.eigenvalues()[0];
  EXPECT_LE(std::abs(e1 - e2), 0.05 * std::abs(e2));
}
