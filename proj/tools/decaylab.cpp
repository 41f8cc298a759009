#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "decaylab/harness/campaign.hpp"

namespace {

using namespace decaylab;
using namespace decaylab::harness;

enum ExitCode { kOk = 0, kVerifyFailed = 1, kConfig = 2, kPrecondition = 3, kRunDirectory = 4, kInternal = 5 };

int report(const std::exception& e) {
  std::cerr << error_report_json(e) << '\n';
  if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const RunDirectoryError*>(&e)) return kRunDirectory;
  if (dynamic_cast<const CellError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const BudgetError*>(&e)) {
    return kPrecondition;
  }
  return kInternal;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Schroedinger operators with decaying potential: campaigns, verification and plot data"};
  app.set_version_flag("--version", std::string(DECAYLAB_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  unsigned threads = 1;
  bool resume = false;
  auto* run = app.add_subcommand("run", "Execute the experiment described by a configuration file");
  run->add_option("--config", config_path, "Configuration file (JSON) or a run manifest")->required()->check(CLI::ExistingFile);
  run->add_option("--threads", threads, "Worker threads (0: all cores)");
  run->add_flag("--resume", resume, "Continue a partially completed run directory");
  run->add_option("--output", output_override, "Override output.directory");

  auto* check = app.add_subcommand("check", "Validate a configuration and print it with every default resolved");
  check->add_option("--config", config_path, "Configuration file (JSON)")->required()->check(CLI::ExistingFile);

  std::string run_dir;
  double sample_fraction = 0.1;
  auto* verify = app.add_subcommand("verify", "Recompute a sample of cells and check the recorded invariants");
  verify->add_option("directory", run_dir, "Run directory")->required();
  verify->add_option("--sample-fraction", sample_fraction, "Fraction of cells recomputed")->check(CLI::Range(0.0, 1.0));
  verify->add_option("--threads", threads, "Worker threads (0: all cores)");

  std::string view;
  std::string out_path;
  auto* exp = app.add_subcommand("export", "Write a long-format plot table for a completed run");
  exp->add_option("directory", run_dir, "Run directory")->required();
  exp->add_option("--view", view, "View name")->required()->check(CLI::IsMember(export_views()));
  exp->add_option("--out", out_path, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig config = load_config(config_path);
      if (!output_override.empty()) config.output.directory = output_override;
      RunOptions opts;
      opts.threads = threads;
      opts.resume = resume;
      opts.log = &std::cerr;
      const RunSummary s = run_campaign(config, opts);
      std::cout << "{\"directory\": " << json_string(s.directory.string()) << ", \"cells\": " << s.cells
                << ", \"computed\": " << s.computed << ", \"resumed\": " << s.resumed << ", \"skipped\": " << s.skipped
                << "}\n";
      return kOk;
    }
    if (*check) {
      std::cout << resolved_json(load_config(config_path)) << '\n';
      return kOk;
    }
    if (*verify) {
      VerifyOptions opts;
      opts.sample_fraction = sample_fraction;
      opts.threads = threads;
      const VerifyReport r = verify_run(run_dir, opts);
      std::cout << r.to_json() << '\n';
      return r.passed() ? kOk : kVerifyFailed;
    }
    if (*exp) {
      if (out_path.empty()) {
        export_view(run_dir, view, std::cout);
      } else {
        std::ofstream out(out_path);
        if (!out) throw RunDirectoryError("cannot write " + out_path);
        export_view(run_dir, view, out);
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    return report(e);
  }
  return kOk;
}
