#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "decaylab/harness/config.hpp"

namespace decaylab::harness {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kCellsFormat = "cells-csv-v1";

/// A module precondition failed while computing one cell.
class CellError : public Error {
 public:
  CellError(std::size_t cell, std::size_t param, std::uint32_t realization, const std::string& message)
      : Error(message), cell_(cell), param_(param), realization_(realization) {}
  std::size_t cell() const { return cell_; }
  std::size_t param() const { return param_; }
  std::uint32_t realization() const { return realization_; }

 private:
  std::size_t cell_;
  std::size_t param_;
  std::uint32_t realization_;
};

/// A run directory is incomplete or does not match its manifest.
class RunDirectoryError : public Error {
 public:
  using Error::Error;
};

/// One campaign cell: a parameter cell crossed with a realization. The module
/// receives (seed, stream) as its (seed, realization) pair.
struct CellSeed {
  std::size_t cell = 0;
  std::size_t param = 0;
  std::uint32_t realization = 0;
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
};

/// Cells in index order: parameter-major, realization-minor.
std::vector<CellSeed> seed_table(const ExperimentConfig& config);

struct RunOptions {
  unsigned threads = 1;
  bool resume = false;
  /// Receives skip notices; may be null.
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::filesystem::path directory;
  std::size_t cells = 0;
  std::size_t computed = 0;
  std::size_t resumed = 0;
  std::size_t skipped = 0;
  std::vector<std::string> notices;
};

/// Executes every cell and writes manifest.json, cells.csv, aggregate tables
/// and sidecars into config.output.directory. Rows are written in cell order
/// by a single writer, so cells.csv does not depend on the thread count.
RunSummary run_campaign(const ExperimentConfig& config, const RunOptions& options = {});

struct VerifyOptions {
  /// Fraction of cells recomputed and compared byte for byte.
  double sample_fraction = 0.1;
  unsigned threads = 1;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  /// Exact identities and integrity checks decide the exit status; findings
  /// (statistical claims) are reported without affecting it.
  bool finding = false;
  std::string detail;
  /// Cell indices implicated in a failure.
  std::vector<std::size_t> cells;
};

struct VerifyReport {
  std::filesystem::path directory;
  std::vector<CheckResult> checks;
  bool passed() const;
  std::string to_json() const;
};

VerifyReport verify_run(const std::filesystem::path& directory, const VerifyOptions& options = {});

/// Long-format plot table for a completed run: "alpha-log-n" (count-vs-alpha),
/// "wegner" (wegner) or "mass-vs-alpha" (localize, dynamics).
/// Throws PreconditionError when the view does not fit the run kind.
void export_view(const std::filesystem::path& directory, const std::string& view, std::ostream& out);
std::vector<std::string> export_views();

/// {"error": {"type", "message", ...}} for an exception raised by the harness.
std::string error_report_json(const std::exception& error);

}  // namespace decaylab::harness
