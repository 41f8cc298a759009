#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "decaylab/hamiltonian.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab::detail {

struct EigenBlock {
  std::vector<double> energies;
  Eigen::MatrixXd vectors;
};

/// Eigenpairs with indices first..last (1-based, inclusive) of a tridiagonal matrix.
EigenBlock tridiagonal_pairs(const SparseMatrix& h, std::size_t first, std::size_t last);

/// All eigenpairs of a small matrix, ascending.
EigenBlock dense_pairs(const SparseMatrix& h);

/// Eigenpairs in ]lo, hi] by shift-invert Lanczos with locking; stops when
/// `expected` pairs have converged or the restart budget is spent.
EigenBlock lanczos_slice(const SparseMatrix& h, double lo, double hi, std::size_t expected, double tolerance,
                         int max_restarts);

/// Orthonormalizes the block and re-solves the projected problem.
EigenBlock rayleigh_ritz(const SparseMatrix& h, const Eigen::MatrixXd& basis);

}  // namespace decaylab::detail
