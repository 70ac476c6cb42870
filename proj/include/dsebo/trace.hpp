#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace dsebo {

// Black-box objective over the ambient search space.
using Objective = std::function<double(const Eigen::VectorXd&)>;

// One completed subspace: its dimension and the best raw value reached
// while it was active.
struct ExpansionRecord {
  int dim = 0;
  double best = 0.0;
};

using ExpansionHistory = std::vector<ExpansionRecord>;

struct TraceRow {
  int iter = 0;        // 1-based evaluation index
  int dim = 0;         // dimension active for this evaluation
  double value = 0.0;  // raw objective value
  double best = 0.0;   // running minimum of `value` over rows so far
  double elapsed_ms = 0.0;
};

// Per-run log: one row per budgeted evaluation plus run metadata.
struct RunTrace {
  std::vector<TraceRow> rows;
  ExpansionHistory expansions;
  std::uint64_t seed = 0;
  std::string config_digest;
  // Value of the unbudgeted dataset-seeding evaluation (NaN when the
  // algorithm has none, e.g. random search).
  double initial_value = std::numeric_limits<double>::quiet_NaN();
  double wall_clock_ms = 0.0;
  // Nonempty when the run aborted (e.g. a non-finite objective value);
  // rows then cover only the evaluations made before the abort.
  std::string error;

  double final_best() const {
    return rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                        : rows.back().best;
  }
};

}  // namespace dsebo
