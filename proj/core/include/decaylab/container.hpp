#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "decaylab/disorder.hpp"
#include "decaylab/hamiltonian.hpp"
#include "decaylab/spectral.hpp"

namespace decaylab {

inline constexpr int kContainerVersion = 1;

/// {"dim", "center", "side", "mesh", "boundary"}.
std::string domain_to_json(const LatticeDomain& domain);
LatticeDomain domain_from_json(const std::string& text);

/// Disorder realization with its (seed, realization, law, site block) identifiers.
std::string field_to_json(const DisorderField& field);
DisorderField field_from_json(const std::string& text);

/// Descriptor of an assembled operator: domain, model parameters, provenance,
/// nonzero count and a SHA-256 of the stored values. Rebuilding the operator
/// from the descriptor must reproduce the digest.
std::string matrix_descriptor_json(const HamiltonianMatrix& h);

/// Energies, counts, method, residual norms (no vectors).
std::string summary_to_json(const SpectralSummary& summary);

/// Flat binary sidecar: magic "DLEV", u32 version, u32 realization, u64 rows,
/// u64 cols, then rows*cols little-endian doubles in column-major order.
void write_eigenvector_sidecar(const std::filesystem::path& path, const Eigen::MatrixXd& vectors,
                               std::uint32_t realization);
Eigen::MatrixXd read_eigenvector_sidecar(const std::filesystem::path& path, std::uint32_t* realization = nullptr);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace decaylab
