#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/disorder.hpp"
#include "decaylab/envelope.hpp"
#include "decaylab/lattice.hpp"
#include "decaylab/single_site.hpp"

namespace decaylab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Which impurities feed the potential of a finite-volume operator.
enum class ImpurityRule {
  /// V restricted to the box: V(x) for nodes x inside, 0 outside.
  RestrictToBox,
  /// Only impurity sites i inside the box contribute, wherever their bump lands.
  SitesInBox,
};

struct PotentialRegion {
  Cube box;
  ImpurityRule rule = ImpurityRule::RestrictToBox;
};

struct ModelParams {
  Envelope envelope = Envelope::power_law(0.0);
  double coupling = 1.0;
  /// When empty every node carries the full potential.
  std::optional<PotentialRegion> region;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::uint32_t realization = 0;
  std::string distribution;
};

/// Sparse symmetric finite-difference operator -Laplacian + V on a grid.
class HamiltonianMatrix {
 public:
  HamiltonianMatrix(SparseMatrix matrix, LatticeDomain domain, ModelParams params, std::vector<double> potential,
                    Provenance provenance);

  const SparseMatrix& matrix() const { return matrix_; }
  const LatticeDomain& domain() const { return domain_; }
  const ModelParams& params() const { return params_; }
  /// Potential term V at every node (non-positive).
  const std::vector<double>& potential() const { return potential_; }
  const Provenance& provenance() const { return provenance_; }

  std::size_t size() const { return domain_.size(); }
  bool is_tridiagonal() const { return domain_.dim() == 1; }
  /// Infinity norm; an upper bound for the spectral norm.
  double norm_bound() const { return norm_bound_; }

 private:
  SparseMatrix matrix_;
  LatticeDomain domain_;
  ModelParams params_;
  std::vector<double> potential_;
  Provenance provenance_;
  double norm_bound_ = 0.0;
};

/// Discrete Laplacian -Delta_h with the domain's boundary condition.
SparseMatrix discrete_laplacian(const LatticeDomain& domain);

/// Potential V(x) = -lambda gamma(x) sum_i omega_i u(x - i) sampled at the nodes.
/// Throws PreconditionError when `field` misses a contributing site.
std::vector<double> sample_potential(const ModelParams& params, const LatticeDomain& domain,
                                     const DisorderField& field, const SingleSitePotential& u);

HamiltonianMatrix assemble_hamiltonian(const ModelParams& params, const LatticeDomain& domain,
                                       const DisorderField& field, const SingleSitePotential& u);

/// Everything needed to draw realizations of one random operator family.
struct ModelSpec {
  int dim = 1;
  double coupling = 1.0;
  Envelope envelope = Envelope::power_law(0.0);
  SingleSitePotential single_site = SingleSitePotential::cube(1.0, 1.0);
  Distribution distribution = Distribution::uniform01();
};

/// Restriction of the ergodic/decaying operator to `box` with boundary `bc`
/// (potential restricted to the box, no buffer).
HamiltonianMatrix restricted_operator(const ModelSpec& model, const LatticeDomain& box, std::uint64_t seed,
                                      std::uint32_t realization);

/// Whole-space surrogate: the potential of `box` (rule as given) embedded in a
/// Dirichlet computational box enlarged by `buffer` on every side.
HamiltonianMatrix embedded_operator(const ModelSpec& model, const LatticeDomain& box, double buffer,
                                    ImpurityRule rule, std::uint64_t seed, std::uint32_t realization);

}  // namespace decaylab
