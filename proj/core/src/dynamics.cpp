#include <algorithm>
#include <cmath>

#include "decaylab/error.hpp"
#include "decaylab/localization.hpp"

namespace decaylab {

Eigen::VectorXd origin_cube_state(const LatticeDomain& domain) {
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain.size()));
  const Site origin{0, 0, 0};
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (enclosing_site(domain.coordinate(i), domain.dim()) == origin) psi[static_cast<Eigen::Index>(i)] = 1.0;
  }
  const double n = psi.norm();
  if (n == 0.0) throw PreconditionError("the grid has no nodes in the unit cube at the origin");
  return psi / n;
}

CorrelatorTable eigenfunction_correlator(const SpectralSummary& summary, const LatticeDomain& domain,
                                         const FitWindow& window) {
  if (!summary.complete) throw PreconditionError("eigenfunction correlator needs a complete eigenpair set");
  CorrelatorTable table;
  const CubeMasses layout = cube_masses(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(domain.size())), domain);
  table.sites = layout.sites;
  table.value.assign(layout.size(), 0.0);
  const std::size_t origin = layout.find(Site{0, 0, 0});
  for (Eigen::Index n = 0; n < summary.vectors.cols(); ++n) {
    const CubeMasses m = cube_masses(summary.vectors.col(n), domain);
    const double at_origin = origin < m.size() ? m.mass[origin] : 0.0;
    for (std::size_t x = 0; x < m.size(); ++x) table.value[x] += m.mass[x] * at_origin;
  }
  CubeMasses as_masses = layout;
  as_masses.mass = table.value;
  table.fit = decay_mass_fit(as_masses, Site{0, 0, 0}, window);
  return table;
}

DynamicsReport dynamics_moment(const SpectralSummary& summary, const LatticeDomain& domain, double order,
                               std::span<const double> times, const FitWindow& window, double domination_tolerance) {
  if (!summary.complete) {
    throw PreconditionError("dynamics_moment refuses an incomplete eigenbasis (moments would be underestimated)");
  }
  DynamicsReport report;
  report.lower = summary.window_lower;
  report.upper = summary.threshold;
  report.order = order;
  report.pairs = summary.energies.size();
  report.times.assign(times.begin(), times.end());
  report.correlator = eigenfunction_correlator(summary, domain, window);

  const auto n = static_cast<Eigen::Index>(domain.size());
  Eigen::VectorXd weight(n);
  std::vector<std::size_t> cube_of(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Point x = domain.coordinate(i);
    weight[static_cast<Eigen::Index>(i)] = std::pow(japanese_bracket(x, domain.dim()), order);
    cube_of[i] = std::lower_bound(report.correlator.sites.begin(), report.correlator.sites.end(),
                                  enclosing_site(x, domain.dim())) -
                 report.correlator.sites.begin();
  }

  const Eigen::VectorXd psi0 = origin_cube_state(domain);
  const Eigen::VectorXd coeff = summary.vectors.transpose() * psi0;
  const auto k = static_cast<Eigen::Index>(summary.energies.size());
  std::vector<double> cube_sq(report.correlator.sites.size());
  for (double t : times) {
    Eigen::VectorXd cos_c(k);
    Eigen::VectorXd sin_c(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double phase = summary.energies[static_cast<std::size_t>(j)] * t;
      cos_c[j] = std::cos(phase) * coeff[j];
      sin_c[j] = -std::sin(phase) * coeff[j];
    }
    const Eigen::VectorXd re = summary.vectors * cos_c;
    const Eigen::VectorXd im = summary.vectors * sin_c;
    const Eigen::VectorXd density = re.cwiseAbs2() + im.cwiseAbs2();
    report.moment.push_back(k == 0 ? 0.0 : weight.dot(density));

    std::fill(cube_sq.begin(), cube_sq.end(), 0.0);
    for (std::size_t i = 0; i < domain.size(); ++i) cube_sq[cube_of[i]] += density[static_cast<Eigen::Index>(i)];
    for (std::size_t x = 0; x < cube_sq.size(); ++x) {
      const double excess = std::sqrt(cube_sq[x]) - report.correlator.value[x];
      report.worst_excess = std::max(report.worst_excess, excess);
      ++report.domination_checks;
    }
  }
  report.sup_moment = report.moment.empty() ? 0.0 : *std::max_element(report.moment.begin(), report.moment.end());
  report.dominated = report.worst_excess <= domination_tolerance;
  return report;
}

}  // namespace decaylab
