#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "decaylab/error.hpp"
#include "decaylab/experiments.hpp"
#include "decaylab/localization.hpp"

using namespace decaylab;

namespace {

LatticeDomain chain(double side, double mesh = 0.25) { return build_domain(1, side, mesh, Boundary::Dirichlet); }

Eigen::VectorXd normalized(Eigen::VectorXd v) { return v / v.norm(); }

SpectralSummary summary_of(const Eigen::MatrixXd& vectors, std::vector<double> energies) {
  SpectralSummary s;
  s.vectors = vectors;
  s.energies = std::move(energies);
  s.count = s.energies.size();
  s.expected = s.count;
  s.complete = true;
  return s;
}

}  // namespace

TEST(LocalizationCenter, SingleCubeSupport) {
  const auto dom = chain(16.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (enclosing_site(dom.coordinate(i), 1)[0] == 3) v[static_cast<Eigen::Index>(i)] = 1.0;
  }
  EXPECT_EQ(localization_center(normalized(v), dom)[0], 3);
}

TEST(LocalizationCenter, SymmetricTieGoesToSmallerSite) {
  const auto dom = chain(16.0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const auto s = enclosing_site(dom.coordinate(i), 1)[0];
    if (s == -4 || s == 3) v[static_cast<Eigen::Index>(i)] = 1.0;
  }
  EXPECT_EQ(localization_center(normalized(v), dom)[0], -4);
}

TEST(LocalizationCenter, DeepImpurityAttractsGroundState) {
  const auto dom = chain(24.0);
  const auto n = static_cast<Eigen::Index>(dom.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  const double inv_h2 = 1.0 / (dom.mesh() * dom.mesh());
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = 2.0 * inv_h2;
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = -inv_h2;
    if (enclosing_site(dom.coordinate(static_cast<std::size_t>(i)), 1)[0] == 5) h(i, i) -= 50.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  EXPECT_EQ(localization_center(eig.eigenvectors().col(0), dom)[0], 5);
}

TEST(CubeMasses, SquaresSumToOne) {
  const auto dom = build_domain(2, 8.0, 0.5, Boundary::Neumann);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(dom.size()), 1.0, 2.0);
  const auto m = cube_masses(normalized(v), dom);
  EXPECT_EQ(m.size(), 81u);  // site-centred cubes, half cubes at the edges
  EXPECT_NEAR(m.total_squared(), 1.0, 1e-12);
}

TEST(DecayMassFit, ExactExponentialProfile) {
  std::vector<double> r;
  std::vector<double> mass;
  for (int k = 2; k < 20; ++k) {
    r.push_back(k);
    mass.push_back(3.0 * std::exp(-0.7 * k));
  }
  const auto fit = decay_mass_fit(r, mass);
  EXPECT_NEAR(fit.mass, 0.7, 1e-6);
  EXPECT_NEAR(fit.prefactor, 3.0, 1e-6);
  EXPECT_TRUE(fit.localized);
}

TEST(DecayMassFit, FlatProfileIsNotLocalized) {
  std::vector<double> r{2, 3, 4, 5, 6, 7};
  std::vector<double> mass(r.size(), 0.1);
  const auto fit = decay_mass_fit(r, mass);
  EXPECT_NEAR(fit.mass, 0.0, 1e-12);
  EXPECT_FALSE(fit.localized);
  EXPECT_FALSE(fit.refused);
}

TEST(DecayMassFit, RefusesTooFewPointsAndCountsZeros) {
  std::vector<double> r{2, 3, 4, 5, 6, 7};
  std::vector<double> mass{0.5, 0.2, 0.0, 0.05, 0.0, 0.01};
  const auto fit = decay_mass_fit(r, mass);
  EXPECT_TRUE(fit.refused);
  EXPECT_EQ(fit.excluded, 2u);
  EXPECT_EQ(fit.points, 4u);
}

TEST(DecayMassFit, GridProfileWindowSkipsCentreAndEdge) {
  const auto dom = chain(32.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) v[static_cast<Eigen::Index>(i)] = std::exp(-0.9 * std::abs(dom.coordinate(i)[0]));
  const auto masses = cube_masses(normalized(v), dom);
  const auto fit = decay_mass_fit(masses, localization_center(masses), FitWindow{});
  EXPECT_NEAR(fit.mass, 0.9, 0.02);
  const auto sule = sule_check(masses, localization_center(masses), fit);
  EXPECT_GT(sule.checked, 0u);
}

TEST(CenterRadius, Examples) {
  const auto boundary = center_radius_prediction(1.0, 1.0, 1.0, -2.0);
  EXPECT_EQ(boundary.scale, 1.0);
  EXPECT_EQ(boundary.branch, 2);
  EXPECT_NEAR(center_radius_prediction(1.0, 1.0, 1.0, -0.5).scale, 4.0, 1e-12);
  EXPECT_NEAR(center_radius_prediction(0.5, 1.0, 1.0, -0.5).scale, 16.0, 1e-12);
  EXPECT_TRUE(std::isinf(center_radius_prediction(0.0, 1.0, 1.0, -0.5).radius));
  EXPECT_THROW(center_radius_prediction(1.0, 1.0, 1.0, 0.0), PreconditionError);
}

TEST(Dynamics, SingleEigenpairIsStationary) {
  const auto dom = chain(8.0);
  Eigen::VectorXd phi(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) phi[static_cast<Eigen::Index>(i)] = std::exp(-std::abs(dom.coordinate(i)[0]));
  const auto s = summary_of(normalized(phi), {-1.3});
  const std::vector<double> times{0.0, 0.5, 3.0, 100.0};
  const auto rep = dynamics_moment(s, dom, 2.0, times);
  for (double m : rep.moment) EXPECT_NEAR(m, rep.moment.front(), 1e-12);
  EXPECT_TRUE(rep.dominated);
}

TEST(Dynamics, EmptyWindowGivesZero) {
  const auto dom = chain(8.0);
  const auto s = summary_of(Eigen::MatrixXd(static_cast<Eigen::Index>(dom.size()), 0), {});
  const std::vector<double> times{0.0, 1.0};
  const auto rep = dynamics_moment(s, dom, 2.0, times);
  for (double m : rep.moment) EXPECT_EQ(m, 0.0);
  for (double q : rep.correlator.value) EXPECT_EQ(q, 0.0);
  EXPECT_EQ(rep.sup_moment, 0.0);
}

TEST(Dynamics, TwoLevelClosedForm) {
  const auto dom = chain(8.0, 0.5);
  const auto n = static_cast<Eigen::Index>(dom.size());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = dom.coordinate(static_cast<std::size_t>(i))[0];
    a[i] = std::exp(-x * x);
    b[i] = x * std::exp(-x * x / 4.0) + 0.3 * a[i];
  }
  a.normalize();
  b -= a.dot(b) * a;
  b.normalize();
  Eigen::MatrixXd vecs(n, 2);
  vecs << a, b;
  const double e1 = -2.0;
  const double e2 = -0.7;
  const auto s = summary_of(vecs, {e1, e2});

  const Eigen::VectorXd psi0 = origin_cube_state(dom);
  const double ca = a.dot(psi0);
  const double cb = b.dot(psi0);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = 1.0 + std::pow(dom.coordinate(static_cast<std::size_t>(i))[0], 2);
  const double maa = (w.array() * a.array() * a.array()).sum();
  const double mbb = (w.array() * b.array() * b.array()).sum();
  const double mab = (w.array() * a.array() * b.array()).sum();

  const std::vector<double> times{0.0, 0.3, 1.1, 2.5, 7.0};
  const auto rep = dynamics_moment(s, dom, 2.0, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expected = ca * ca * maa + cb * cb * mbb + 2.0 * ca * cb * mab * std::cos((e1 - e2) * times[k]);
    EXPECT_NEAR(rep.moment[k], expected, 1e-12) << "t = " << times[k];
  }
  EXPECT_TRUE(rep.dominated);
}

TEST(Dynamics, RefusesIncompleteBasis) {
  const auto dom = chain(8.0);
  auto s = summary_of(Eigen::MatrixXd(static_cast<Eigen::Index>(dom.size()), 0), {});
  s.complete = false;
  const std::vector<double> times{0.0};
  EXPECT_THROW(dynamics_moment(s, dom, 2.0, times), PreconditionError);
}

TEST(Correlator, SingleEigenfunctionIsProductOfMasses) {
  const auto dom = chain(16.0);
  Eigen::VectorXd phi(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < dom.size(); ++i) phi[static_cast<Eigen::Index>(i)] = std::exp(-0.6 * std::abs(dom.coordinate(i)[0]));
  phi.normalize();
  const auto s = summary_of(phi, {-1.0});
  const auto q = eigenfunction_correlator(s, dom);
  const auto m = cube_masses(phi, dom);
  const double at_origin = m.mass[m.find(Site{0, 0, 0})];
  ASSERT_EQ(q.value.size(), m.size());
  for (std::size_t x = 0; x < m.size(); ++x) EXPECT_NEAR(q.value[x], m.mass[x] * at_origin, 1e-15);
  const auto direct = decay_mass_fit(m, Site{0, 0, 0});
  EXPECT_NEAR(q.fit.mass, direct.mass, 1e-10);
}

TEST(Correlator, DominatesPropagatedOriginState) {
  LocalizeConfig cfg;
  cfg.model.coupling = 8.0;
  cfg.side = 24.0;
  cfg.buffer = 4.0;
  cfg.times = {0.0, 0.5, 2.0, 10.0, 100.0};
  cfg.keep_vectors = true;
  const auto run = localize_realization(cfg, 0.5, 7, 0);
  ASSERT_TRUE(run.dynamics.has_value());
  EXPECT_TRUE(run.dynamics->dominated);
  EXPECT_GT(run.dynamics->domination_checks, 0u);
  EXPECT_LE(run.dynamics->worst_excess, 1e-12);
  for (const auto& p : run.profiles) EXPECT_LE(p.partition_error, 1e-10);
}
