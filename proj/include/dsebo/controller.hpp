#pragma once

#include <cstdint>
#include <utility>

#include "dsebo/acquisition.hpp"
#include "dsebo/trace.hpp"

namespace dsebo {

struct DseboConfig {
  int d_l = 5;                   // initial subspace dimension
  int d_h = 100;                 // dimension upper bound
  double beta = 12.0;            // expansion-scale hyperparameter
  int budget = 500;              // total budgeted evaluations
  double alpha_threshold = 0.5;  // significant-improvement threshold on b
  std::uint64_t seed = 0;
  AcquisitionConfig acquisition{};

  // Paper defaults for an ambient dimension: d_l = 5, d_h = min(D, 100).
  static DseboConfig defaults_for(int ambient_dim);

  void validate(int ambient_dim) const;
};

struct ControllerState {
  int d_current = 0;
  int delta_d = 0;          // last dimension increment
  int threshold = 1;        // T
  int stall_counter = 0;
  double reference_best = 0.0;  // b: value at the last counter reset
};

// T = floor((1 + (d - d_l)/(d_h - d_l)) * budget / (2 beta)), at least 1;
// the fraction is 0 when d_h = d_l.
int convergence_threshold(int d, const DseboConfig& cfg);

// Dynamic dimension expanding step: with fewer than two completed
// subspaces the increment is floor((d_h - d_l)/beta) (at least 1);
// otherwise the latest best-value slope is min-max normalized into
// [0.5, 1.5] and scales the previous increment. Returns (d_next, delta_d).
// Must only be called when d_current < d_h.
std::pair<int, int> next_dimension(const ExpansionHistory& history,
                                   const ControllerState& state,
                                   const DseboConfig& cfg);

// Full DSEBO loop: shared embedding, GP + LCB proposals, stall-triggered
// dimension expansion with zero-padded dataset carry-over. One unbudgeted
// dataset-seeding evaluation precedes exactly cfg.budget budgeted ones.
// A non-finite objective value aborts the run; the partial trace carries
// the error message in trace.error.
RunTrace run_dsebo(const Objective& objective, int ambient_dim,
                   const DseboConfig& cfg);

}  // namespace dsebo
