#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decaylab/error.hpp"
#include "decaylab/experiments.hpp"
#include "decaylab/localization.hpp"

namespace decaylab::harness {

/// Schema violation in an experiment configuration. `path` names the offending key.
class ConfigError : public FormatError {
 public:
  ConfigError(std::string path, const std::string& message)
      : FormatError(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ExperimentKind { Ids, E0, CountVsAlpha, Trial, Growth, Wegner, Localize, Dynamics };

std::string to_string(ExperimentKind kind);
/// Throws ConfigError for an unknown name.
ExperimentKind kind_from_string(const std::string& name);

/// Power-law envelope <x>^{-alpha}, optionally carrying a growth witness F(r) = scale r^exponent.
struct EnvelopeBlock {
  double alpha = 0.0;
  struct Witness {
    double scale = 1.0;
    double exponent = 0.5;
    double r0 = 1.0;
  };
  std::optional<Witness> witness;
};

struct SingleSiteBlock {
  /// "cube" or "tabulated".
  std::string type = "cube";
  double u0 = 1.0;
  double delta = 1.0;
  int resolution = 0;
  std::vector<double> samples;
};

struct DisorderBlock {
  /// "uniform01", "bernoulli" or "bounded-density".
  std::string kind = "uniform01";
  double p = 0.5;
  std::vector<double> bins;
};

struct ModelBlock {
  int dim = 1;
  double coupling = 1.0;
  EnvelopeBlock envelope;
  SingleSiteBlock single_site;
  DisorderBlock disorder;
};

struct NumericsBlock {
  /// 0 selects default_mesh(dim).
  double mesh = 0.0;
  double side = 64.0;
  double buffer = 8.0;
  double floor_side = 16.0;
  Boundary boundary = Boundary::Dirichlet;
  /// Cells whose grid exceeds this many unknowns are skipped with a notice.
  std::size_t max_unknowns = 4'000'000;
  double window_fraction = 0.2;
  FitWindow fit;
  double sule_eps = 0.5;
  double sule_slack = 0.8;
  RadiusConfig radius;
  double radius_safety = 4.0;
  double moment_order = 2.0;
  double nu_tolerance = 1e-3;
};

struct CampaignBlock {
  std::size_t realizations = 10;
  std::uint64_t seed = 0;
  std::vector<double> energies{-0.5};
  double energy = -0.5;
  double reference_energy = -1.0;
  std::vector<double> alphas;
  std::vector<double> etas;
  std::vector<double> sides;
  std::vector<double> times;
  std::vector<WegnerCenter> centers;
  std::optional<double> mu;
  /// Lower band of the alpha log n view; estimated before the cells run when absent.
  std::optional<double> nu0;
  double nu0_side = 64.0;
  std::size_t nu0_realizations = 20;
};

struct OutputBlock {
  std::filesystem::path directory = "run";
  /// Subset of {"csv", "json"} for the aggregate table.
  std::vector<std::string> formats{"csv", "json"};
  /// Binary eigenvector sidecars for localize/dynamics cells.
  bool eigenvectors = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Ids;
  ModelBlock model;
  NumericsBlock numerics;
  CampaignBlock campaign;
  OutputBlock output;
};

/// Parses and validates a configuration document. Unknown keys, keys that do
/// not apply to the experiment kind and out-of-range values are rejected.
/// A run manifest is accepted too; its embedded configuration is used.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of the configuration with every default written out.
std::string resolved_json(const ExperimentConfig& config);

/// The model block turned into a sampler specification.
ModelSpec model_spec(const ModelBlock& block);

double resolved_mesh(const ExperimentConfig& config);

}  // namespace decaylab::harness
