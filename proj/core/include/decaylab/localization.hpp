#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "decaylab/lattice.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

/// ||chi_x phi|| over the unit cubes of Z^d that carry grid nodes.
struct CubeMasses {
  int dim = 1;
  std::vector<Site> sites;  // lexicographic order
  std::vector<double> mass;
  /// Number of cube layers between a site and the edge of the grid (0 = outermost).
  std::vector<int> depth;

  double total_squared() const;
  /// Index of `site`, or size() when absent.
  std::size_t find(const Site& site) const;
  std::size_t size() const { return sites.size(); }
};

/// Masses of an l2-normalized grid vector; sum of squares is 1.
CubeMasses cube_masses(const Eigen::Ref<const Eigen::VectorXd>& vec, const LatticeDomain& domain);

/// Argmax of the cube mass; near-ties (relative 1e-12) go to the
/// lexicographically smallest site.
Site localization_center(const CubeMasses& masses);
Site localization_center(const Eigen::Ref<const Eigen::VectorXd>& vec, const LatticeDomain& domain);

double site_distance(const Site& a, const Site& b, int dim);

struct FitWindow {
  /// Cubes closer than this to the centre are skipped.
  double inner_radius = 2.0;
  /// Cube layers at the grid edge that are skipped.
  int outer_layers = 2;
  /// Masses below floor * max mass are treated as numerical zeros.
  double relative_floor = 1e-13;
};

struct DecayFit {
  double mass = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
  /// Window cubes dropped because their mass is zero or under the floor.
  std::size_t excluded = 0;
  bool refused = false;
  bool localized = false;
  std::string note;
};

inline constexpr std::size_t kMinFitPoints = 5;
inline constexpr double kLocalizedMassThreshold = 1e-6;

/// log ||chi_x phi|| ~ log C - m |x - center| by least squares over the window.
DecayFit decay_mass_fit(const CubeMasses& masses, const Site& center, const FitWindow& window = {});

/// Same fit on raw (distance, mass) pairs, already windowed.
DecayFit decay_mass_fit(std::span<const double> distance, std::span<const double> mass);

struct SuleCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t below_floor = 0;
  /// max over cubes of mass / bound.
  double worst_ratio = 0.0;
  bool passed() const { return violations == 0; }
};

/// mass(x) <= C e^{|center|^eps} e^{-slack m |x - center|} on every cube above the floor.
SuleCheck sule_check(const CubeMasses& masses, const Site& center, const DecayFit& fit, double eps = 0.5,
                     double slack = 0.8, double relative_floor = 1e-13);

struct RadiusConfig {
  /// Multiplies L_E in the power-law branch.
  double power_branch_constant = 1.0;
  /// c in max(1, c/|E|) L_E for the other branch.
  double inverse_branch_constant = 1.0;
};

struct RadiusPrediction {
  double radius = 0.0;
  /// max{1, (2 lambda u0 / |E|)^{1/alpha}}.
  double scale = 0.0;
  /// 1: |E| < 2 lambda u0 and alpha <= 1; 2 otherwise.
  int branch = 1;
};

/// Radius of the ball around the origin that holds localization centres at energy E.
/// For alpha = 0 and |E| < 2 lambda u0 the radius is infinite (no confinement).
RadiusPrediction center_radius_prediction(double alpha, double coupling, double u0, double energy,
                                          const RadiusConfig& config = {});

/// Q(x) = sum_n ||chi_x phi_n|| ||chi_0 phi_n|| over the pairs of a summary.
struct CorrelatorTable {
  std::vector<Site> sites;
  std::vector<double> value;
  DecayFit fit;
};

CorrelatorTable eigenfunction_correlator(const SpectralSummary& summary, const LatticeDomain& domain,
                                         const FitWindow& window = {});

struct DynamicsReport {
  double lower = 0.0;
  double upper = 0.0;
  double order = 2.0;
  std::size_t pairs = 0;
  std::vector<double> times;
  std::vector<double> moment;
  double sup_moment = 0.0;
  CorrelatorTable correlator;
  /// Largest ||chi_x U(t) P psi0|| - Q(x) over all (x, t); <= tolerance when dominated.
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t domination_checks = 0;
  bool dominated = true;
};

/// Moments M_p(t) = sum_i <x_i>^p |(U(t) P psi0)_i|^2 for psi0 the normalized
/// indicator of the unit cube at the origin, expanded in the summary's pairs.
/// Throws PreconditionError if the summary is incomplete or the origin cube
/// carries no nodes.
DynamicsReport dynamics_moment(const SpectralSummary& summary, const LatticeDomain& domain, double order,
                               std::span<const double> times, const FitWindow& window = {},
                               double domination_tolerance = 1e-12);

/// Normalized indicator of the origin's unit cube on the grid.
Eigen::VectorXd origin_cube_state(const LatticeDomain& domain);

}  // namespace decaylab
