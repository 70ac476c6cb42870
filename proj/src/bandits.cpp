#include "dsebo/bandits.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"

namespace dsebo {

namespace {

const std::vector<std::pair<std::string, StrategyKind>>& kind_table() {
  static const std::vector<std::pair<std::string, StrategyKind>> table = {
      {"epsilon_greedy", StrategyKind::epsilon_greedy},
      {"c_ucb", StrategyKind::c_ucb},
      {"ucb_e", StrategyKind::ucb_e},
      {"thompson", StrategyKind::thompson},
      {"softmax", StrategyKind::softmax},
      {"successive_halving", StrategyKind::successive_halving},
      {"extreme", StrategyKind::extreme},
      {"expectation", StrategyKind::expectation},
      {"random", StrategyKind::random},
  };
  return table;
}

std::size_t argmax_score(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

std::vector<double> mean_rewards(const std::vector<Arm>& arms) {
  std::vector<double> m(arms.size());
  for (std::size_t i = 0; i < arms.size(); ++i) m[i] = arms[i].mean_reward();
  return m;
}

// Arm indices ranked best-first by mean reward, index as tie-break.
std::vector<std::size_t> rank_by_mean(const std::vector<Arm>& arms) {
  std::vector<std::size_t> order(arms.size());
  std::iota(order.begin(), order.end(), 0);
  const std::vector<double> m = mean_rewards(arms);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return m[a] > m[b]; });
  return order;
}

// Successive halving plan: every phase gives each active arm `quota`
// additional pulls (round-robin by arm index), then keeps the better
// ceil(half) of the arms; whatever budget remains goes to the survivor.
std::size_t select_successive_halving(const StrategyConfig& cfg,
                                      const std::vector<Arm>& arms, int t) {
  const int n = static_cast<int>(arms.size());
  if (n == 1) return 0;
  const int phases =
      std::max(1, static_cast<int>(std::ceil(std::log2(n))));
  const int quota = std::max(1, cfg.budget / (n * phases));
  // 0-based index among post-warm-up selections
  int idx = t - n - 1;
  int active = n;
  for (int phase = 0; phase < phases; ++phase) {
    const int phase_pulls = active * quota;
    if (idx < phase_pulls) {
      std::vector<std::size_t> order = rank_by_mean(arms);
      order.resize(active);
      std::sort(order.begin(), order.end());
      return order[idx % active];
    }
    idx -= phase_pulls;
    active = std::max(1, (active + 1) / 2);
  }
  return rank_by_mean(arms).front();  // survivor takes the remainder
}

}  // namespace

StrategyKind strategy_from_name(const std::string& name) {
  for (const auto& [n, k] : kind_table())
    if (n == name) return k;
  throw ConfigError("unknown MAB strategy: " + name);
}

std::string strategy_name(StrategyKind kind) {
  for (const auto& [n, k] : kind_table())
    if (k == kind) return n;
  return "?";
}

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, k] : kind_table()) v.push_back(n);
    return v;
  }();
  return names;
}

Arm::Arm(int dim, int ambient_dim, std::uint64_t arm_seed,
         const AcquisitionConfig& acq)
    : dim_(dim), embedding_(ambient_dim, dim, arm_seed), data_(dim),
      fitter_(arm_seed), init_rng_(substream(arm_seed, Stream::dataset_init)),
      acq_rng_(substream(arm_seed, Stream::acquisition)), acq_(acq) {}

double Arm::mean_reward() const {
  if (pulls_ == 0) throw UsageError("mean_reward of an unpulled arm");
  return reward_sum_ / static_cast<double>(pulls_);
}

double Arm::max_single_reward() const {
  if (pulls_ == 0) throw UsageError("max_single_reward of an unpulled arm");
  return reward_max_;
}

double Arm::pull(const Objective& objective, const AmbientBox& box) {
  Eigen::VectorXd z;
  if (pulls_ == 0) {
    z = sample_subspace_point(dim_, init_rng_);
  } else {
    const GpModel model = fitter_.fit(data_);
    const double kappa = kappa_schedule(pulls_, dim_, acq_.delta);
    const Eigen::VectorXd incumbent = data_.point(data_.argmin());
    z = propose(model, incumbent, kappa, acq_rng_, acq_);
  }
  const double y = objective(embedding_.embed(z, box));
  if (!std::isfinite(y)) throw DataError("non-finite objective value");
  data_.append(z, y);
  best_ = pulls_ == 0 ? y : std::min(best_, y);
  ++pulls_;
  reward_sum_ += -best_;
  reward_max_ = pulls_ == 1 ? -best_ : std::max(reward_max_, -best_);
  return y;
}

double reward(const Arm& arm) {
  if (arm.pulls() == 0) throw UsageError("reward of an unpulled arm");
  return -arm.best();
}

std::size_t select_arm(const StrategyConfig& cfg, const std::vector<Arm>& arms,
                       int t, std::mt19937_64& rng) {
  if (arms.empty()) throw ConfigError("select_arm: empty arm list");
  for (const Arm& arm : arms)
    if (arm.pulls() == 0)
      throw UsageError("select_arm: all arms need a warm-up pull first");
  const std::size_t n = arms.size();

  switch (cfg.kind) {
    case StrategyKind::random:
      return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    case StrategyKind::epsilon_greedy: {
      if (uniform01(rng) < cfg.epsilon)
        return static_cast<std::size_t>(uniform01(rng) *
                                        static_cast<double>(n));
      return argmax_score(mean_rewards(arms));
    }
    case StrategyKind::c_ucb: {
      std::vector<double> s(n);
      for (std::size_t i = 0; i < n; ++i)
        s[i] = arms[i].mean_reward() +
               std::sqrt(2.0 * std::log(static_cast<double>(t)) /
                         static_cast<double>(arms[i].pulls()));
      return argmax_score(s);
    }
    case StrategyKind::ucb_e: {
      std::vector<double> s(n);
      for (std::size_t i = 0; i < n; ++i)
        s[i] = arms[i].mean_reward() +
               std::sqrt(cfg.ucb_e_c / static_cast<double>(arms[i].pulls()));
      return argmax_score(s);
    }
    case StrategyKind::thompson: {
      std::vector<double> s(n);
      for (std::size_t i = 0; i < n; ++i)
        s[i] = arms[i].mean_reward() +
               standard_normal(rng) /
                   std::sqrt(static_cast<double>(arms[i].pulls()));
      return argmax_score(s);
    }
    case StrategyKind::softmax: {
      std::vector<double> m = mean_rewards(arms);
      const double top = *std::max_element(m.begin(), m.end());
      std::vector<double> w(n);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::exp((m[i] - top) / cfg.tau);
        total += w[i];
      }
      double u = uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        u -= w[i];
        if (u <= 0.0) return i;
      }
      return n - 1;
    }
    case StrategyKind::successive_halving:
      return select_successive_halving(cfg, arms, t);
    case StrategyKind::extreme: {
      std::vector<double> s(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = arms[i].max_single_reward();
      return argmax_score(s);
    }
    case StrategyKind::expectation:
      return argmax_score(mean_rewards(arms));
  }
  throw UsageError("select_arm: unreachable");
}

void MabConfig::validate(int ambient_dim) const {
  if (arm_dims.empty()) throw ConfigError("mab: empty arm dimension list");
  for (int d : arm_dims)
    if (d < 1 || d > ambient_dim)
      throw ConfigError("mab: arm dimension outside [1, D]");
  if (budget < static_cast<int>(arm_dims.size()))
    throw ConfigError("mab: budget below the warm-up cost (one pull per arm)");
  acquisition.validate();
}

RunTrace run_mab(const Objective& objective, int ambient_dim,
                 const MabConfig& cfg) {
  cfg.validate(ambient_dim);
  const auto run_start = std::chrono::steady_clock::now();

  RunTrace trace;
  trace.seed = cfg.seed;
  trace.rows.reserve(cfg.budget);

  std::vector<Arm> arms;
  arms.reserve(cfg.arm_dims.size());
  for (std::size_t i = 0; i < cfg.arm_dims.size(); ++i)
    arms.emplace_back(
        cfg.arm_dims[i], ambient_dim,
        mix_seed(cfg.seed,
                 static_cast<std::uint64_t>(Stream::arm_base) + i),
        cfg.acquisition);

  StrategyConfig strategy = cfg.strategy;
  strategy.budget = cfg.budget;
  auto strat_rng = substream(cfg.seed, Stream::bandit_strategy);

  double best = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= cfg.budget; ++t) {
    const auto iter_start = std::chrono::steady_clock::now();
    const std::size_t idx =
        t <= static_cast<int>(arms.size())
            ? static_cast<std::size_t>(t - 1)
            : select_arm(strategy, arms, t, strat_rng);
    double y = 0.0;
    try {
      y = arms[idx].pull(objective);
    } catch (const DataError& e) {
      trace.error = std::string(e.what()) + " at iteration " +
                    std::to_string(t);
      break;
    }
    best = std::min(best, y);
    const double iter_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - iter_start)
                               .count();
    trace.rows.push_back({t, arms[idx].dim(), y, best, iter_ms});
  }

  trace.wall_clock_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - run_start)
                            .count();
  return trace;
}

}  // namespace dsebo
