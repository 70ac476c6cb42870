#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dsebo/acquisition.hpp"
#include "dsebo/embedding.hpp"
#include "dsebo/surrogate.hpp"
#include "dsebo/trace.hpp"

namespace dsebo {

enum class StrategyKind {
  epsilon_greedy,
  c_ucb,
  ucb_e,
  thompson,
  softmax,
  successive_halving,
  extreme,
  expectation,
  random,
};

StrategyKind strategy_from_name(const std::string& name);
std::string strategy_name(StrategyKind kind);
const std::vector<std::string>& strategy_names();

struct StrategyConfig {
  StrategyKind kind = StrategyKind::random;
  double epsilon = 0.5;  // epsilon-greedy exploration probability
  double ucb_e_c = 0.5;  // UCB-E exploration constant
  double tau = 1.0;      // softmax temperature
  int budget = 500;      // total pulls; successive halving plans phases from it
};

// A fixed-dimension random-embedding BO instance. Arms never share
// embedding matrices or data: each owns a matrix drawn from its own seed
// stream. The first pull seeds the dataset with a uniform point; later
// pulls run one GP/LCB step.
class Arm {
public:
  Arm(int dim, int ambient_dim, std::uint64_t arm_seed,
      const AcquisitionConfig& acq = {});

  int dim() const { return dim_; }
  int pulls() const { return pulls_; }
  double best() const { return best_; }
  // Running mean of the per-pull rewards (reward = -best after the pull).
  double mean_reward() const;
  double max_single_reward() const;

  // Advances the arm by one evaluation; returns the raw objective value.
  double pull(const Objective& objective, const AmbientBox& box = {});

private:
  int dim_;
  SharedEmbedding embedding_;
  SubspaceDataset data_;
  GpFitter fitter_;
  std::mt19937_64 init_rng_;
  std::mt19937_64 acq_rng_;
  AcquisitionConfig acq_;
  int pulls_ = 0;
  double best_ = 0.0;
  double reward_sum_ = 0.0;
  double reward_max_ = 0.0;
};

// Negated best-so-far of the arm (minimization: higher reward is better).
double reward(const Arm& arm);

// Picks the arm to advance at global iteration t (1-based, warm-up
// included). Every arm must have been pulled at least once. All kinds are
// deterministic given the rng state; successive halving derives its phase
// plan from (|arms|, cfg.budget) and the current mean rewards, which is
// stable because per-arm mean rewards are nondecreasing in pulls.
std::size_t select_arm(const StrategyConfig& cfg, const std::vector<Arm>& arms,
                       int t, std::mt19937_64& rng);

struct MabConfig {
  std::vector<int> arm_dims = {10, 20, 30, 50, 70, 90, 100};
  StrategyConfig strategy{};
  int budget = 500;
  std::uint64_t seed = 0;
  AcquisitionConfig acquisition{};

  void validate(int ambient_dim) const;
};

// Warm-up pulls each arm once (budgeted), then each iteration advances the
// strategy-selected arm by one evaluation. The trace records the overall
// best-so-far; trace.dim is the pulled arm's dimension.
RunTrace run_mab(const Objective& objective, int ambient_dim,
                 const MabConfig& cfg);

}  // namespace dsebo
