// Experiment runner CLI: run / sweep / summarize / dump-embedding.
// Exit codes: 0 success, 2 configuration error, 3 numerical or data error.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dsebo/embedding.hpp"
#include "dsebo/errors.hpp"
#include "dsebo/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::istringstream ss(csv);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field.empty()) continue;
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw dsebo::ConfigError("sweep: bad value: " + field);
    }
  }
  if (values.empty()) throw dsebo::ConfigError("sweep: empty value list");
  return values;
}

fs::path resolve_out(const dsebo::ExperimentConfig& cfg,
                     const std::string& out_flag) {
  if (!out_flag.empty()) return out_flag;
  if (!cfg.out.empty()) return cfg.out;
  throw dsebo::ConfigError("no output directory: pass --out or set \"out\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DSEBO experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir, param, values_csv, dump_path;
  int dump_D = 1000, dump_dh = 100;
  std::uint64_t dump_seed = 0;

  CLI::App* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("--config", config_path, "Config JSON file")->required();
  run->add_option("--out", out_dir, "Output directory");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run a parameter sweep (beta or d_h)");
  sweep_cmd->add_option("--config", config_path, "Config JSON file")
      ->required();
  sweep_cmd->add_option("--param", param, "Swept parameter: beta | d_h")
      ->required();
  sweep_cmd->add_option("--values", values_csv, "Comma-separated values")
      ->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory");

  CLI::App* summarize =
      app.add_subcommand("summarize", "Recompute statistics from trace CSVs");
  summarize->add_option("--in", in_dir, "Directory of trace files")
      ->required();

  CLI::App* dump = app.add_subcommand(
      "dump-embedding", "Write a shared embedding matrix for audit");
  dump->add_option("--D", dump_D, "Ambient dimension");
  dump->add_option("--d-h", dump_dh, "Maximum subspace dimension");
  dump->add_option("--seed", dump_seed, "Matrix seed");
  dump->add_option("--out", dump_path, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto cfg = dsebo::load_experiment_config(config_path);
      const auto result = dsebo::run_experiment(cfg, resolve_out(cfg, out_dir));
      std::cout << "wrote " << result.trace_files.size() << " trace files and "
                << result.summary_file.string() << "\n";
    } else if (*sweep_cmd) {
      const auto cfg = dsebo::load_experiment_config(config_path);
      const auto results = dsebo::sweep(cfg, param, parse_values(values_csv),
                                        resolve_out(cfg, out_dir));
      std::cout << "swept " << param << " over " << results.size()
                << " values under " << resolve_out(cfg, out_dir).string()
                << "\n";
    } else if (*summarize) {
      std::cout << dsebo::summarize_directory(in_dir) << "\n";
    } else if (*dump) {
      const dsebo::SharedEmbedding emb(dump_D, dump_dh, dump_seed);
      std::ofstream out(dump_path, std::ios::binary);
      if (!out) throw dsebo::ConfigError("cannot open " + dump_path);
      dsebo::write_embedding(emb, out);
      std::cout << "wrote " << dump_path << "\n";
    }
  } catch (const dsebo::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const dsebo::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const dsebo::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const dsebo::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
