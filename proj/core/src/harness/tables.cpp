#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "kinds.hpp"

namespace decaylab::harness::detail {

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw RunDirectoryError("table has no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const { return parse_number(text(row, name)); }

const std::string& Table::text(std::size_t row, const std::string& name) const {
  const std::size_t c = column(name);
  if (row >= rows.size() || c >= rows[row].size()) throw RunDirectoryError("table row " + std::to_string(row) + " is short");
  return rows[row][c];
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_count(std::size_t value) { return std::to_string(value); }

std::string format_flag(bool value) { return value ? "1" : "0"; }

double parse_number(const std::string& field) {
  if (field.empty()) return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) return std::nan("");
  return v;
}

std::string join_csv(const Row& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ',';
    line += row[i];
  }
  return line;
}

Row split_csv(const std::string& line) {
  Row out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += ch;
    }
  }
  out.push_back(field);
  return out;
}

std::string render_csv(const Table& table) {
  std::string text = join_csv(table.header) + "\n";
  for (const Row& r : table.rows) text += join_csv(r) + "\n";
  return text;
}

Table parse_csv(const std::string& text, const std::string& name) {
  Table t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw RunDirectoryError(name + " is empty");
  t.header = split_csv(line);
  while (std::getline(in, line)) {
    Row r = split_csv(line);
    if (r.size() != t.header.size()) {
      throw RunDirectoryError(name + " row " + std::to_string(t.rows.size()) + " has " + std::to_string(r.size()) +
                              " fields, expected " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

json table_json(const Table& table) {
  json rows = json::array();
  for (const Row& r : table.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < table.header.size() && i < r.size(); ++i) {
      const double v = parse_number(r[i]);
      if (std::isfinite(v)) {
        obj[table.header[i]] = v;
      } else if (r[i] == "nan" || r[i] == "-nan" || r[i].empty()) {
        obj[table.header[i]] = nullptr;
      } else {
        obj[table.header[i]] = r[i];
      }
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

std::vector<std::string> cell_columns() { return {"cell", "param", "realization", "seed", "stream", "status"}; }

Row cell_prefix(const CellSeed& seed, bool skipped) {
  return {format_count(seed.cell), format_count(seed.param), std::to_string(seed.realization), std::to_string(seed.seed),
          std::to_string(seed.stream), skipped ? "skipped" : "ok"};
}

}  // namespace decaylab::harness::detail
