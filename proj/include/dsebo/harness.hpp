#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsebo/bandits.hpp"
#include "dsebo/benchmarks.hpp"
#include "dsebo/controller.hpp"
#include "dsebo/trace.hpp"

namespace dsebo {

// A parsed experiment description. The config file is JSON; unknown keys
// anywhere are hard errors.
struct ExperimentConfig {
  std::string function = "sphere";  // base-function registry name
  int ambient_dim = 1000;           // D
  int effective_dim = 30;           // d_f
  double shift = 0.1;               // c
  double penalty_constant = 1e4;    // K

  // dsebo | fixed_embedding | random_search | mab:<strategy>
  std::string algorithm = "dsebo";
  int budget = 500;
  int repetitions = 10;
  std::uint64_t base_seed = 0;
  int parallel = 1;            // repetition threads; DSEBO_PARALLEL overrides
  bool record_timings = false; // write measured elapsed_ms into trace CSVs
  std::string out;             // default output directory (CLI may override)

  DseboConfig dsebo{};     // used by dsebo
  int fixed_dim = 10;      // used by fixed_embedding
  MabConfig mab{};         // used by mab:*
  AcquisitionConfig acquisition{};

  std::string digest;  // FNV-1a hash of the canonical config text

  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& file);

// DSEBO with expansion disabled: d_l = d_h = d, same GP/acquisition stack.
RunTrace run_fixed_embedding(const Objective& objective, int ambient_dim,
                             int d, int budget, std::uint64_t seed,
                             const AcquisitionConfig& acq = {});

// Uniform samples in the ambient box.
RunTrace run_random_search(const Objective& objective, int ambient_dim,
                           int budget, std::uint64_t seed,
                           const AmbientBox& box = {});

// Builds the configured objective (F_c over the registry base function).
HighDimFunction make_objective(const ExperimentConfig& cfg);

// One repetition with the given seed, dispatched on cfg.algorithm.
RunTrace run_one(const ExperimentConfig& cfg, std::uint64_t seed);

// Trace CSV: header iter,dim,f,best,elapsed_ms; UTF-8, LF endings, floats
// as shortest round-trip decimals. Unless with_timings, elapsed_ms is
// written as 0 to keep files byte-stable across reruns.
void write_trace_csv(const RunTrace& trace, std::ostream& out,
                     bool with_timings = false);
RunTrace read_trace_csv(std::istream& in);

std::string format_double(double v);  // shortest round-trip decimal

struct ExperimentResult {
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path summary_file;
};

// Runs `repetitions` independent repetitions with seeds base_seed + r,
// writes trace_<r>.csv per run plus summary.json (mean/std of final best,
// overall best, mean wall-clock seconds, per-run metadata). Repetitions run
// on cfg.parallel threads. Throws DataError after writing if any run
// aborted.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir);

// One run_experiment per value in a <param>_<value>/ subdirectory plus a
// cross-value sweep_summary.json. param is "beta" or "d_h" (dsebo only);
// d_h values are clipped to D.
std::vector<ExperimentResult> sweep(const ExperimentConfig& cfg,
                                    const std::string& param,
                                    const std::vector<double>& values,
                                    const std::filesystem::path& out_dir);

// Recomputes summary statistics from the trace files in a directory;
// returns the summary JSON text.
std::string summarize_directory(const std::filesystem::path& dir);

// Parallelism degree after the DSEBO_PARALLEL environment override.
int effective_parallelism(int configured);

}  // namespace dsebo
