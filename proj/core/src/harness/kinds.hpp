#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "decaylab/harness/campaign.hpp"

namespace decaylab::harness::detail {

using nlohmann::json;
using Row = std::vector<std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Index of a column; throws RunDirectoryError when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
  const std::string& text(std::size_t row, const std::string& name) const;
};

std::string format_number(double value);
std::string format_count(std::size_t value);
std::string format_flag(bool value);
/// strtod over the whole field; NaN for anything unparsable.
double parse_number(const std::string& field);

std::string join_csv(const Row& row);
Row split_csv(const std::string& line);
std::string render_csv(const Table& table);
/// Header plus rows; throws RunDirectoryError on ragged rows.
Table parse_csv(const std::string& text, const std::string& name);
json table_json(const Table& table);

struct DetailSpec {
  std::string file;
  std::vector<std::string> columns;
};

struct CellOutput {
  Row values;
  /// One row list per detail table, in detail_tables() order.
  std::vector<std::vector<Row>> details;
  bool skipped = false;
  std::string notice;
  Eigen::MatrixXd vectors;
};

struct Aggregate {
  Table table;
  json summary = json::object();
};

/// Cells and detail tables of a run, parsed back from disk or kept from memory.
struct RunTables {
  Table cells;
  std::vector<Table> details;
};

/// Experiment-specific part of a campaign.
class Kind {
 public:
  explicit Kind(const ExperimentConfig& config) : config_(config) {}
  virtual ~Kind() = default;

  const ExperimentConfig& config() const { return config_; }

  virtual std::size_t params() const = 0;
  virtual std::vector<std::string> columns() const = 0;
  virtual std::vector<DetailSpec> detail_tables() const { return {}; }
  /// true: every parameter cell of realization r sees the same disorder.
  virtual bool shared_disorder() const { return true; }

  /// Quantities computed once before the cells; stored in the manifest.
  virtual json compute_prelude() const { return json::object(); }
  virtual void set_prelude(const json&) {}

  virtual CellOutput compute(const CellSeed& cell) const = 0;
  virtual Aggregate aggregate(const RunTables& run) const = 0;
  virtual std::vector<CheckResult> invariants(const RunTables& run) const = 0;

 protected:
  ExperimentConfig config_;
};

std::unique_ptr<Kind> make_kind(const ExperimentConfig& config);

/// Columns every cells.csv row starts with.
std::vector<std::string> cell_columns();
Row cell_prefix(const CellSeed& seed, bool skipped);

}  // namespace decaylab::harness::detail
