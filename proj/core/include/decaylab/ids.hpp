#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "decaylab/hamiltonian.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

struct IdsOptions {
  /// Grid spacing; 0 selects default_mesh(dim).
  double mesh = 0.0;
  unsigned threads = 1;
  CountOptions counting;
};

/// Finite-volume estimate of the integrated density of states n(H_L, E) / L^d.
struct IdsEstimate {
  int dim = 1;
  double coupling = 0.0;
  double side = 0.0;
  Boundary boundary = Boundary::Dirichlet;
  std::size_t realizations = 0;
  std::vector<double> energies;
  std::vector<double> mean;
  std::vector<double> stderr_mean;
  /// counts[r][k] = n(H_r, energies[k]).
  std::vector<std::vector<std::size_t>> counts;
  std::size_t shifted_counts = 0;
};

/// Realization r uses (seed, r); boxes are centred at the origin with the
/// potential restricted to the box. Requires an ergodic (alpha = 0) model.
IdsEstimate estimate_ids(const ModelSpec& model, std::span<const double> energies, double side, Boundary bc,
                         std::size_t realizations, std::uint64_t seed, const IdsOptions& options = {});

void write_ids_csv(std::ostream& out, const IdsEstimate& estimate);

struct SpectralBottomEstimate {
  double coupling = 0.0;
  /// Minimum Neumann ground energy over the realizations.
  double e0 = 0.0;
  /// -lambda U0, which the estimate may never undercut.
  double lower_bound = 0.0;
  double side = 0.0;
  std::size_t realizations = 0;
  std::vector<double> ground_energies;
  std::string bias_note;
};

SpectralBottomEstimate estimate_E0(const ModelSpec& model, double side, std::size_t realizations,
                                   std::uint64_t seed, const IdsOptions& options = {});

struct NuEstimate {
  double nu0 = 0.0;
  double energy = 0.0;
  double coupling = 0.0;
  double e0 = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
};

/// inf { nu in ]0,1[ : E0(nu lambda) < E } by bisection, with E0 estimated on
/// the same realizations for every nu. Throws PreconditionError unless
/// E0(lambda) < E < 0.
NuEstimate nu0(const ModelSpec& model, double energy, double tolerance, double side, std::size_t realizations,
               std::uint64_t seed, const IdsOptions& options = {});

struct CountingBounds {
  double lower = 0.0;
  double upper = 0.0;
  /// Side of the inner cube on which the decaying potential dominates nu lambda.
  double inner_side = 0.0;
  /// Side of the outer cube beyond which no state at E can live.
  double outer_side = 0.0;
};

/// inner_side = (2/sqrt(d)) (nu^{-2/alpha} - 1)^{1/2}, outer_side = 2 |lambda U0 / E|^{1/alpha};
/// lower = inner_side^d (ids_lower - delta) clamped at 0, upper = outer_side^d (ids_upper + delta).
CountingBounds counting_bounds(int dim, double alpha, double nu, double delta, double coupling, double energy,
                               double ids_lower, double ids_upper, double u0_periodized);

}  // namespace decaylab
