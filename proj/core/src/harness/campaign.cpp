#include "decaylab/harness/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <ostream>
#include <sstream>

#include "decaylab/container.hpp"
#include "decaylab/parallel.hpp"
#include "decaylab/rng.hpp"
#include "kinds.hpp"

namespace decaylab::harness {

using detail::json;
using detail::Row;
using detail::Table;

namespace {

namespace fs = std::filesystem;

constexpr const char* kManifest = "manifest.json";
constexpr const char* kCells = "cells.csv";

std::size_t param_count(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::Ids:
      return c.campaign.energies.size();
    case ExperimentKind::E0:
      return 1;
    case ExperimentKind::CountVsAlpha:
    case ExperimentKind::Localize:
    case ExperimentKind::Dynamics:
      return c.campaign.alphas.size();
    case ExperimentKind::Trial:
    case ExperimentKind::Growth:
      return c.campaign.sides.size();
    case ExperimentKind::Wegner: {
      const std::size_t centers =
          c.campaign.centers.empty()
              ? default_wegner_centers(model_spec(c.model), c.campaign.reference_energy, c.numerics.side).size()
              : c.campaign.centers.size();
      return centers * c.campaign.etas.size();
    }
  }
  return 0;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunDirectoryError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RunDirectoryError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw RunDirectoryError("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // a trailing partial line is dropped
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string> cells_header(const detail::Kind& kind) {
  std::vector<std::string> h = detail::cell_columns();
  for (const std::string& c : kind.columns()) h.push_back(c);
  return h;
}

std::vector<std::string> detail_header(const detail::DetailSpec& spec) {
  std::vector<std::string> h{"cell"};
  h.insert(h.end(), spec.columns.begin(), spec.columns.end());
  return h;
}

std::string sidecar_name(std::size_t cell) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "sidecars/cell_%06zu.dlev", cell);
  return buf;
}

json read_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifest;
  if (!fs::exists(path)) throw RunDirectoryError("no manifest.json in " + dir.string());
  try {
    json m = json::parse(read_file(path));
    if (!m.contains("manifest_version") || m["manifest_version"] != kManifestVersion) {
      throw RunDirectoryError("unsupported manifest version");
    }
    return m;
  } catch (const json::exception& e) {
    throw RunDirectoryError(std::string("manifest.json is malformed: ") + e.what());
  }
}

json seed_table_json(const std::vector<CellSeed>& seeds) {
  json rows = json::array();
  for (const CellSeed& s : seeds) rows.push_back({s.cell, s.param, s.realization, s.seed, s.stream});
  return {{"columns", {"cell", "param", "realization", "seed", "stream"}}, {"rows", rows}};
}

std::string row_line(const CellSeed& seed, const detail::CellOutput& out) {
  Row row = detail::cell_prefix(seed, out.skipped);
  row.insert(row.end(), out.values.begin(), out.values.end());
  return detail::join_csv(row);
}

std::vector<std::string> detail_lines(std::size_t cell, const detail::CellOutput& out, std::size_t table) {
  std::vector<std::string> lines;
  if (table >= out.details.size()) return lines;
  for (const Row& r : out.details[table]) {
    Row full{std::to_string(cell)};
    full.insert(full.end(), r.begin(), r.end());
    lines.push_back(detail::join_csv(full));
  }
  return lines;
}

detail::CellOutput compute_cell(const detail::Kind& kind, const CellSeed& seed) {
  try {
    return kind.compute(seed);
  } catch (const CellError&) {
    throw;
  } catch (const std::exception& e) {
    throw CellError(seed.cell, seed.param, seed.realization, e.what());
  }
}

detail::RunTables load_tables(const fs::path& dir, const detail::Kind& kind) {
  detail::RunTables run;
  run.cells = detail::parse_csv(read_file(dir / kCells), kCells);
  for (const detail::DetailSpec& spec : kind.detail_tables()) {
    run.details.push_back(detail::parse_csv(read_file(dir / spec.file), spec.file));
  }
  return run;
}

std::string aggregate_json_text(const ExperimentConfig& config, const detail::Aggregate& a) {
  const json doc{{"format", "aggregate-json-v1"},
                 {"kind", to_string(config.kind)},
                 {"columns", a.table.header},
                 {"rows", detail::table_json(a.table)},
                 {"summary", a.summary}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::vector<CellSeed> seed_table(const ExperimentConfig& config) {
  const std::size_t params = param_count(config);
  const bool shared = config.kind != ExperimentKind::Wegner;
  std::vector<CellSeed> out;
  out.reserve(params * config.campaign.realizations);
  for (std::size_t p = 0; p < params; ++p) {
    for (std::size_t r = 0; r < config.campaign.realizations; ++r) {
      CellSeed s;
      s.cell = out.size();
      s.param = p;
      s.realization = static_cast<std::uint32_t>(r);
      s.seed = shared ? config.campaign.seed : derive_seed(config.campaign.seed, p);
      s.stream = static_cast<std::uint32_t>(r);
      out.push_back(s);
    }
  }
  return out;
}

RunSummary run_campaign(const ExperimentConfig& config, const RunOptions& options) {
  std::unique_ptr<detail::Kind> kind;
  try {
    kind = detail::make_kind(config);
  } catch (const ConfigError&) {
    throw;
  } catch (const PreconditionError& e) {
    throw ConfigError("model", e.what());
  }
  const fs::path dir = config.output.directory;
  const std::string resolved = resolved_json(config);
  const std::vector<CellSeed> seeds = seed_table(config);
  const std::vector<detail::DetailSpec> details = kind->detail_tables();
  const std::string header = detail::join_csv(cells_header(*kind));

  RunSummary summary;
  summary.directory = dir;
  summary.cells = seeds.size();

  json manifest;
  std::size_t done = 0;
  std::vector<std::string> kept_cells;
  std::vector<std::vector<std::string>> kept_details(details.size());
  if (fs::exists(dir / kManifest)) {
    if (!options.resume) {
      throw RunDirectoryError(dir.string() + " already holds a run; pass --resume to continue it");
    }
    manifest = read_manifest(dir);
    if (manifest.value("config_sha256", "") != sha256_hex(resolved)) {
      throw RunDirectoryError("the configuration differs from the one recorded in " + (dir / kManifest).string());
    }
    // Keep the contiguous prefix of complete rows; later output is recomputed.
    if (fs::exists(dir / kCells)) {
      const std::vector<std::string> lines = lines_of(read_file(dir / kCells));
      if (!lines.empty() && lines.front() != header) throw RunDirectoryError("cells.csv header does not match the run");
      const std::size_t width = cells_header(*kind).size();
      for (std::size_t i = 1; i < lines.size() && done < seeds.size(); ++i) {
        const Row r = detail::split_csv(lines[i]);
        if (r.size() != width || r[0] != std::to_string(done)) break;
        kept_cells.push_back(lines[i]);
        ++done;
      }
    }
    for (std::size_t t = 0; t < details.size(); ++t) {
      if (!fs::exists(dir / details[t].file)) continue;
      const std::vector<std::string> lines = lines_of(read_file(dir / details[t].file));
      const std::size_t width = details[t].columns.size() + 1;
      for (std::size_t i = 1; i < lines.size(); ++i) {
        const Row r = detail::split_csv(lines[i]);
        if (r.size() != width) break;
        const double cell = detail::parse_number(r[0]);
        if (!(cell >= 0.0) || static_cast<std::size_t>(cell) >= done) break;
        kept_details[t].push_back(lines[i]);
      }
    }
    summary.resumed = done;
  } else {
    fs::create_directories(dir);
    manifest = {{"manifest_version", kManifestVersion},
                {"tool", {{"name", "decaylab"}, {"version", DECAYLAB_VERSION}}},
                {"config", json::parse(resolved)},
                {"config_sha256", sha256_hex(resolved)},
                {"prelude", kind->compute_prelude()},
                {"seed_table", seed_table_json(seeds)}};
  }
  kind->set_prelude(manifest["prelude"]);
  manifest["status"] = "running";
  manifest["formats"] = {{"cells", kCellsFormat},
                         {"details", "detail-csv-v1"},
                         {"aggregate_csv", "aggregate-csv-v1"},
                         {"aggregate_json", "aggregate-json-v1"},
                         {"sidecar", "DLEV-" + std::to_string(kContainerVersion)}};
  write_file(dir / kManifest, manifest.dump(2) + "\n");

  // Rewrite the kept prefix so every file ends on a complete row.
  std::string cells_text = header + "\n";
  for (const std::string& l : kept_cells) cells_text += l + "\n";
  write_file(dir / kCells, cells_text);
  json start_hashes{{kCells, sha256_hex(cells_text)}};
  for (std::size_t t = 0; t < details.size(); ++t) {
    std::string text = detail::join_csv(detail_header(details[t])) + "\n";
    for (const std::string& l : kept_details[t]) text += l + "\n";
    write_file(dir / details[t].file, text);
    start_hashes[details[t].file] = sha256_hex(text);
  }
  if (config.output.eigenvectors) fs::create_directories(dir / "sidecars");

  std::ofstream cells_out(dir / kCells, std::ios::binary | std::ios::app);
  std::vector<std::ofstream> detail_out;
  for (const detail::DetailSpec& spec : details) detail_out.emplace_back(dir / spec.file, std::ios::binary | std::ios::app);

  std::map<std::size_t, std::string> notices;
  for (std::size_t i = 0; i < done; ++i) {
    if (detail::split_csv(kept_cells[i])[5] == "skipped") {
      notices[i] = compute_cell(*kind, seeds[i]).notice;
      ++summary.skipped;
    }
  }

  // Single writer: results are flushed strictly in cell order.
  std::mutex guard;
  std::map<std::size_t, detail::CellOutput> pending;
  std::size_t next = done;
  const std::size_t remaining = seeds.size() - done;
  parallel_for(remaining, options.threads, [&](std::size_t k) {
    const CellSeed& seed = seeds[done + k];
    detail::CellOutput out = compute_cell(*kind, seed);
    std::lock_guard lock(guard);
    pending.emplace(seed.cell, std::move(out));
    for (auto it = pending.find(next); it != pending.end(); it = pending.find(next)) {
      const CellSeed& s = seeds[next];
      const detail::CellOutput& o = it->second;
      for (std::size_t t = 0; t < details.size(); ++t) {
        for (const std::string& l : detail_lines(s.cell, o, t)) detail_out[t] << l << '\n';
        detail_out[t].flush();
      }
      if (config.output.eigenvectors && o.vectors.size() > 0) {
        write_eigenvector_sidecar(dir / sidecar_name(s.cell), o.vectors, s.stream);
      }
      cells_out << row_line(s, o) << '\n';
      cells_out.flush();
      if (o.skipped) {
        notices[s.cell] = o.notice;
        ++summary.skipped;
        if (options.log) *options.log << "cell " << s.cell << ": " << o.notice << '\n';
      }
      ++summary.computed;
      pending.erase(it);
      ++next;
    }
  });
  cells_out.close();
  for (auto& f : detail_out) f.close();

  const detail::RunTables run = load_tables(dir, *kind);
  const detail::Aggregate agg = kind->aggregate(run);
  json files;
  {
    const std::string text = read_file(dir / kCells);
    json rows = json::array();
    const std::vector<std::string> lines = lines_of(text);
    for (std::size_t i = 1; i < lines.size(); ++i) rows.push_back(sha256_hex(lines[i]));
    files[kCells] = {{"format", kCellsFormat},
                     {"start_sha256", start_hashes[kCells]},
                     {"sha256", sha256_hex(text)},
                     {"header_sha256", sha256_hex(lines.front())},
                     {"rows", rows}};
  }
  for (const detail::DetailSpec& spec : details) {
    const std::string text = read_file(dir / spec.file);
    json rows = json::array(), row_cells = json::array();
    const std::vector<std::string> lines = lines_of(text);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      rows.push_back(sha256_hex(lines[i]));
      row_cells.push_back(static_cast<std::size_t>(detail::parse_number(detail::split_csv(lines[i])[0])));
    }
    files[spec.file] = {{"format", "detail-csv-v1"},
                        {"start_sha256", start_hashes[spec.file]},
                        {"sha256", sha256_hex(text)},
                        {"header_sha256", sha256_hex(lines.front())},
                        {"rows", rows},
                        {"row_cells", row_cells}};
  }
  const auto has_format = [&](const char* f) {
    return std::find(config.output.formats.begin(), config.output.formats.end(), f) != config.output.formats.end();
  };
  if (has_format("csv")) {
    const std::string text = detail::render_csv(agg.table);
    write_file(dir / "aggregate.csv", text);
    files["aggregate.csv"] = {{"format", "aggregate-csv-v1"}, {"sha256", sha256_hex(text)}};
  }
  if (has_format("json")) {
    const std::string text = aggregate_json_text(config, agg);
    write_file(dir / "aggregate.json", text);
    files["aggregate.json"] = {{"format", "aggregate-json-v1"}, {"sha256", sha256_hex(text)}};
  }
  if (config.output.eigenvectors) {
    for (const CellSeed& s : seeds) {
      const fs::path p = dir / sidecar_name(s.cell);
      if (fs::exists(p)) files[sidecar_name(s.cell)] = {{"format", "DLEV-1"}, {"sha256", sha256_file(p)}};
    }
  }
  json notice_list = json::array();
  for (const auto& [cell, text] : notices) {
    notice_list.push_back({{"cell", cell}, {"message", text}});
    summary.notices.push_back("cell " + std::to_string(cell) + ": " + text);
  }
  manifest["files"] = files;
  manifest["notices"] = notice_list;
  manifest["status"] = "complete";
  write_file(dir / kManifest, manifest.dump(2) + "\n");
  return summary;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.finding || c.passed; });
}

std::string VerifyReport::to_json() const {
  json list = json::array();
  for (const CheckResult& c : checks) {
    list.push_back({{"name", c.name},
                    {"status", c.passed ? "pass" : "fail"},
                    {"class", c.finding ? "finding" : "invariant"},
                    {"detail", c.detail},
                    {"cells", c.cells}});
  }
  return json{{"directory", directory.string()}, {"passed", passed()}, {"checks", list}}.dump(2);
}

VerifyReport verify_run(const fs::path& directory, const VerifyOptions& options) {
  if (!(options.sample_fraction >= 0.0 && options.sample_fraction <= 1.0)) {
    throw PreconditionError("sample fraction must lie in [0, 1]");
  }
  VerifyReport report;
  report.directory = directory;
  const json manifest = read_manifest(directory);
  const ExperimentConfig config = parse_config(manifest.dump());
  std::unique_ptr<detail::Kind> kind = detail::make_kind(config);
  kind->set_prelude(manifest.value("prelude", json::object()));
  const std::vector<CellSeed> seeds = seed_table(config);
  const std::vector<detail::DetailSpec> details = kind->detail_tables();

  CheckResult status;
  status.name = "run complete";
  status.passed = manifest.value("status", "") == "complete" && manifest.contains("files");
  if (!status.passed) status.detail = "manifest status is '" + manifest.value("status", "") + "'";
  report.checks.push_back(status);
  if (!status.passed) throw RunDirectoryError("run in " + directory.string() + " is incomplete; resume it first");

  // Row-level integrity against the hashes recorded at the end of the run.
  CheckResult rows_check;
  rows_check.name = "row hashes match the manifest";
  std::set<std::size_t> tampered;
  std::map<std::string, std::vector<std::string>> lines;
  const json& files = manifest["files"];
  for (const std::string& name : [&] {
         std::vector<std::string> n{kCells};
         for (const auto& d : details) n.push_back(d.file);
         return n;
       }()) {
    if (!fs::exists(directory / name)) {
      rows_check.passed = false;
      rows_check.detail += name + " missing; ";
      for (const CellSeed& s : seeds) tampered.insert(s.cell);
      continue;
    }
    lines[name] = lines_of(read_file(directory / name));
    const std::vector<std::string>& ls = lines[name];
    const json& rec = files.at(name);
    const json& hashes = rec.at("rows");
    if (ls.empty() || sha256_hex(ls.front()) != rec.at("header_sha256")) {
      rows_check.passed = false;
      rows_check.detail += name + " header changed; ";
    }
    const std::size_t n = std::max(hashes.size(), ls.empty() ? 0 : ls.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const bool present = i + 1 < ls.size();
      const bool recorded = i < hashes.size();
      if (present && recorded && sha256_hex(ls[i + 1]) == hashes[i].get<std::string>()) continue;
      rows_check.passed = false;
      std::size_t cell = i;
      if (name != kCells && recorded) cell = rec.at("row_cells")[i].get<std::size_t>();
      if (name != kCells && !recorded) {
        cell = static_cast<std::size_t>(detail::parse_number(detail::split_csv(ls[i + 1])[0]));
      }
      tampered.insert(cell);
      rows_check.detail += name + " row " + std::to_string(i + 1) + "; ";
    }
  }
  rows_check.cells.assign(tampered.begin(), tampered.end());
  if (rows_check.detail.empty()) rows_check.detail = "all rows intact";
  report.checks.push_back(rows_check);

  CheckResult aggregate_files;
  aggregate_files.name = "aggregate and sidecar files match the manifest";
  for (auto it = files.begin(); it != files.end(); ++it) {
    if (it.key() == kCells || lines.count(it.key())) continue;
    const fs::path p = directory / it.key();
    if (!fs::exists(p) || sha256_file(p) != it.value().at("sha256").get<std::string>()) {
      aggregate_files.passed = false;
      aggregate_files.detail += it.key() + "; ";
    }
  }
  report.checks.push_back(aggregate_files);

  // Tables without the tampered rows; these feed the remaining checks.
  detail::RunTables run;
  {
    const std::vector<std::string>& ls = lines[kCells];
    run.cells.header = ls.empty() ? cells_header(*kind) : detail::split_csv(ls.front());
    for (std::size_t i = 1; i < ls.size(); ++i) {
      if (tampered.count(i - 1)) continue;
      Row r = detail::split_csv(ls[i]);
      if (r.size() == run.cells.header.size()) run.cells.rows.push_back(std::move(r));
    }
    for (const detail::DetailSpec& spec : details) {
      Table t;
      const std::vector<std::string>& dl = lines[spec.file];
      t.header = dl.empty() ? detail_header(spec) : detail::split_csv(dl.front());
      for (std::size_t i = 1; i < dl.size(); ++i) {
        Row r = detail::split_csv(dl[i]);
        if (r.size() != t.header.size()) continue;
        const double cell = detail::parse_number(r[0]);
        if (!(cell >= 0.0) || tampered.count(static_cast<std::size_t>(cell))) continue;
        t.rows.push_back(std::move(r));
      }
      run.details.push_back(std::move(t));
    }
  }

  CheckResult seeds_check;
  seeds_check.name = "cells follow the manifest seed table";
  for (const Row& r : run.cells.rows) {
    const std::size_t cell = static_cast<std::size_t>(detail::parse_number(r[0]));
    if (cell >= seeds.size()) {
      seeds_check.passed = false;
      continue;
    }
    const CellSeed& s = seeds[cell];
    if (r[1] != std::to_string(s.param) || r[2] != std::to_string(s.realization) || r[3] != std::to_string(s.seed) ||
        r[4] != std::to_string(s.stream)) {
      seeds_check.passed = false;
      seeds_check.cells.push_back(cell);
    }
  }
  if (run.cells.rows.size() + tampered.size() < seeds.size()) {
    seeds_check.passed = false;
    seeds_check.detail = "rows missing";
  }
  report.checks.push_back(seeds_check);

  // Byte-for-byte recomputation of an evenly spaced sample of cells.
  CheckResult recompute;
  recompute.name = "recomputed cells reproduce the stored rows";
  std::vector<std::size_t> sample;
  if (options.sample_fraction > 0.0 && !seeds.empty()) {
    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(options.sample_fraction * static_cast<double>(seeds.size()))));
    for (std::size_t j = 0; j < k; ++j) sample.push_back(j * seeds.size() / k);
    sample.erase(std::unique(sample.begin(), sample.end()), sample.end());
  }
  std::map<std::size_t, std::vector<std::vector<std::string>>> stored_details;
  for (std::size_t t = 0; t < details.size(); ++t) {
    const std::vector<std::string>& dl = lines[details[t].file];
    for (std::size_t i = 1; i < dl.size(); ++i) {
      const double cell = detail::parse_number(detail::split_csv(dl[i])[0]);
      if (!(cell >= 0.0)) continue;
      auto& slot = stored_details[static_cast<std::size_t>(cell)];
      slot.resize(details.size());
      slot[t].push_back(dl[i]);
    }
  }
  std::vector<char> mismatch(sample.size(), 0);
  parallel_for(sample.size(), options.threads, [&](std::size_t j) {
    const CellSeed& s = seeds[sample[j]];
    const detail::CellOutput out = compute_cell(*kind, s);
    const std::vector<std::string>& ls = lines[kCells];
    if (s.cell + 1 >= ls.size() || ls[s.cell + 1] != row_line(s, out)) {
      mismatch[j] = 1;
      return;
    }
    for (std::size_t t = 0; t < details.size(); ++t) {
      const auto it = stored_details.find(s.cell);
      const std::vector<std::string> expected = detail_lines(s.cell, out, t);
      const std::vector<std::string> stored =
          it == stored_details.end() ? std::vector<std::string>{} : it->second[t];
      if (expected != stored) mismatch[j] = 1;
    }
  });
  for (std::size_t j = 0; j < sample.size(); ++j) {
    if (mismatch[j]) {
      recompute.passed = false;
      recompute.cells.push_back(sample[j]);
    }
  }
  recompute.detail = std::to_string(sample.size()) + " of " + std::to_string(seeds.size()) + " cells recomputed";
  report.checks.push_back(recompute);

  if (tampered.empty() && files.contains("aggregate.csv")) {
    CheckResult agg;
    agg.name = "aggregate.csv follows from cells";
    agg.passed = detail::render_csv(kind->aggregate(run).table) == read_file(directory / "aggregate.csv");
    report.checks.push_back(agg);
  }

  for (CheckResult& c : kind->invariants(run)) report.checks.push_back(std::move(c));
  return report;
}

std::vector<std::string> export_views() { return {"alpha-log-n", "wegner", "mass-vs-alpha"}; }

void export_view(const fs::path& directory, const std::string& view, std::ostream& out) {
  const json manifest = read_manifest(directory);
  const ExperimentConfig config = parse_config(manifest.dump());
  std::unique_ptr<detail::Kind> kind = detail::make_kind(config);
  kind->set_prelude(manifest.value("prelude", json::object()));
  const auto incompatible = [&] {
    return PreconditionError("view '" + view + "' does not apply to a " + to_string(config.kind) + " run");
  };
  const detail::RunTables run = load_tables(directory, *kind);
  Table t;
  if (view == "alpha-log-n") {
    if (config.kind != ExperimentKind::CountVsAlpha) throw incompatible();
    const json& p = manifest["prelude"];
    const std::string lo = p.contains("band_lo") && p["band_lo"].is_number() ? detail::format_number(p["band_lo"]) : "nan";
    const std::string hi = p.contains("band_hi") && p["band_hi"].is_number() ? detail::format_number(p["band_hi"]) : "nan";
    t.header = {"alpha", "realization", "n", "alpha_log_n", "band_lo", "band_hi"};
    for (std::size_t i = 0; i < run.cells.rows.size(); ++i) {
      if (run.cells.text(i, "status") != "ok") continue;
      t.rows.push_back({run.cells.text(i, "alpha"), run.cells.text(i, "realization"), run.cells.text(i, "count"),
                        run.cells.text(i, "alpha_log_n"), lo, hi});
    }
  } else if (view == "wegner") {
    if (config.kind != ExperimentKind::Wegner) throw incompatible();
    const detail::Aggregate a = kind->aggregate(run);
    t.header = {"eta", "L", "center_class", "prob", "trace_mean"};
    for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
      t.rows.push_back({a.table.text(i, "eta"), a.table.text(i, "L"), a.table.text(i, "center_class"),
                        a.table.text(i, "prob"), a.table.text(i, "trace_mean")});
    }
  } else if (view == "mass-vs-alpha") {
    if (config.kind != ExperimentKind::Localize && config.kind != ExperimentKind::Dynamics) throw incompatible();
    const Table& prof = run.details.at(0);
    t.header = {"alpha", "E_n", "m", "C", "center_radius", "predicted_radius"};
    for (std::size_t i = 0; i < prof.rows.size(); ++i) {
      t.rows.push_back({prof.text(i, "alpha"), prof.text(i, "energy"), prof.text(i, "m"), prof.text(i, "C"),
                        prof.text(i, "center_norm"), prof.text(i, "predicted_radius")});
    }
  } else {
    throw PreconditionError("unknown view '" + view + "'");
  }
  out << detail::render_csv(t);
}

std::string error_report_json(const std::exception& error) {
  json e{{"message", error.what()}};
  if (const auto* c = dynamic_cast<const ConfigError*>(&error)) {
    e["type"] = "config";
    e["path"] = c->path();
  } else if (const auto* c = dynamic_cast<const CellError*>(&error)) {
    e["type"] = "cell";
    e["cell"] = c->cell();
    e["param"] = c->param();
    e["realization"] = c->realization();
  } else if (dynamic_cast<const RunDirectoryError*>(&error)) {
    e["type"] = "run-directory";
  } else if (dynamic_cast<const BudgetError*>(&error)) {
    e["type"] = "budget";
  } else if (dynamic_cast<const PreconditionError*>(&error)) {
    e["type"] = "precondition";
  } else if (dynamic_cast<const FormatError*>(&error)) {
    e["type"] = "format";
  } else if (dynamic_cast<const Error*>(&error)) {
    e["type"] = "error";
  } else {
    e["type"] = "internal";
  }
  return json{{"error", e}}.dump();
}

}  // namespace decaylab::harness
