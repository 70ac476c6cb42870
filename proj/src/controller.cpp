#include "dsebo/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "dsebo/embedding.hpp"
#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"
#include "dsebo/surrogate.hpp"

namespace dsebo {

namespace {

double elapsed_ms_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

DseboConfig DseboConfig::defaults_for(int ambient_dim) {
  DseboConfig cfg;
  cfg.d_h = std::min(ambient_dim, 100);
  cfg.d_l = std::min(5, cfg.d_h);
  return cfg;
}

void DseboConfig::validate(int ambient_dim) const {
  if (d_l < 1 || d_l > d_h || d_h > ambient_dim)
    throw ConfigError("dsebo: need 1 <= d_l <= d_h <= D");
  if (!(beta > 0.0)) throw ConfigError("dsebo: beta must be positive");
  if (budget < 1) throw ConfigError("dsebo: budget must be at least 1");
  if (!(alpha_threshold >= 0.0))
    throw ConfigError("dsebo: alpha_threshold must be nonnegative");
  acquisition.validate();
}

int convergence_threshold(int d, const DseboConfig& cfg) {
  const double range = static_cast<double>(cfg.d_h - cfg.d_l);
  const double frac =
      range > 0.0 ? static_cast<double>(d - cfg.d_l) / range : 0.0;
  const double t =
      std::floor((1.0 + frac) * static_cast<double>(cfg.budget) /
                 (2.0 * cfg.beta));
  return std::max(1, static_cast<int>(t));
}

std::pair<int, int> next_dimension(const ExpansionHistory& history,
                                   const ControllerState& state,
                                   const DseboConfig& cfg) {
  if (state.d_current >= cfg.d_h)
    throw UsageError("next_dimension: already at the upper bound d_h");
  int delta = 0;
  const std::size_t n = history.size();
  if (n < 2) {
    delta = std::max(
        1, static_cast<int>(std::floor(
               static_cast<double>(cfg.d_h - cfg.d_l) / cfg.beta)));
  } else {
    std::vector<double> slopes(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      slopes[i] = -(history[i + 1].best - history[i].best) /
                  static_cast<double>(history[i + 1].dim - history[i].dim);
    const double s_min = *std::min_element(slopes.begin(), slopes.end());
    const double s_max = *std::max_element(slopes.begin(), slopes.end());
    if (s_min == s_max) {
      delta = state.delta_d;
    } else {
      const double k = (slopes.back() - s_min) / (s_max - s_min) + 0.5;
      delta = std::max(
          1, static_cast<int>(std::floor(k * state.delta_d)));
    }
  }
  return {std::min(state.d_current + delta, cfg.d_h), delta};
}

RunTrace run_dsebo(const Objective& objective, int ambient_dim,
                   const DseboConfig& cfg) {
  cfg.validate(ambient_dim);
  const auto run_start = std::chrono::steady_clock::now();

  RunTrace trace;
  trace.seed = cfg.seed;
  trace.rows.reserve(cfg.budget);

  const SharedEmbedding emb(ambient_dim, cfg.d_h, cfg.seed);
  auto init_rng = substream(cfg.seed, Stream::dataset_init);
  auto acq_rng = substream(cfg.seed, Stream::acquisition);
  GpFitter fitter(cfg.seed);

  const auto evaluate_z = [&](const Eigen::VectorXd& z) {
    return objective(emb.embed(z));
  };

  int d = cfg.d_l;
  SubspaceDataset data(d);
  try {
    data = init_dataset(d, init_rng, evaluate_z);
  } catch (const DataError& e) {
    trace.error = e.what();
    trace.wall_clock_ms = elapsed_ms_since(run_start);
    return trace;
  }
  trace.initial_value = data.value(0);

  ControllerState state;
  state.d_current = d;
  state.delta_d = std::max(
      1, static_cast<int>(
             std::floor(static_cast<double>(cfg.d_h - cfg.d_l) / cfg.beta)));
  state.threshold = convergence_threshold(d, cfg);
  state.stall_counter = 0;
  state.reference_best = data.min_value();

  double best_row = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= cfg.budget; ++t) {
    const auto iter_start = std::chrono::steady_clock::now();
    const GpModel model = fitter.fit(data);
    const double kappa = kappa_schedule(t, d, cfg.acquisition.delta);
    const Eigen::VectorXd incumbent = data.point(data.argmin());
    const Eigen::VectorXd z =
        propose(model, incumbent, kappa, acq_rng, cfg.acquisition);
    const double y = objective(emb.embed(z));
    if (!std::isfinite(y)) {
      trace.error = "non-finite objective value at iteration " +
                    std::to_string(t);
      break;
    }
    data.append(z, y);

    best_row = std::min(best_row, y);
    trace.rows.push_back(
        {t, d, y, best_row, elapsed_ms_since(iter_start)});

    const double current_best = data.min_value();
    if (state.reference_best - current_best > cfg.alpha_threshold) {
      state.reference_best = current_best;
      state.stall_counter = 0;
    } else {
      ++state.stall_counter;
    }

    if (state.stall_counter >= state.threshold && d < cfg.d_h &&
        t < cfg.budget) {
      trace.expansions.push_back({d, current_best});
      state.d_current = d;
      const auto [d_next, delta] = next_dimension(trace.expansions, state, cfg);
      data = init_dataset(data, d_next);
      d = d_next;
      state.d_current = d;
      state.delta_d = delta;
      state.threshold = convergence_threshold(d, cfg);
      state.stall_counter = 0;
      state.reference_best = data.min_value();
    }
  }

  trace.wall_clock_ms = elapsed_ms_since(run_start);
  return trace;
}

}  // namespace dsebo
