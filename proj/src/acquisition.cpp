#include "dsebo/acquisition.hpp"

#include <cmath>
#include <numbers>

#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"

namespace dsebo {

void AcquisitionConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("acquisition delta must lie in (0,1)");
  if (n_uniform <= 0 || n_local <= 0)
    throw ConfigError("acquisition candidate counts must be positive");
  if (!(local_sigma_scale > 0.0))
    throw ConfigError("acquisition local_sigma_scale must be positive");
}

double kappa_schedule(int t, int d, double delta) {
  if (t < 1 || d < 1) throw UsageError("kappa_schedule: t and d must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw UsageError("kappa_schedule: delta must lie in (0,1)");
  const double td = static_cast<double>(t);
  return 2.0 * std::log(static_cast<double>(d) * td * td *
                        std::numbers::pi * std::numbers::pi / (6.0 * delta));
}

double lcb(double mean, double std, double kappa) {
  return mean - std::sqrt(kappa) * std;
}

Eigen::VectorXd propose(const GpModel& model, const Eigen::VectorXd& incumbent,
                        double kappa, std::mt19937_64& rng,
                        const AcquisitionConfig& cfg) {
  cfg.validate();
  const int d = model.dim();
  if (incumbent.size() != d)
    throw UsageError("propose: incumbent dimension mismatch");
  const double half = subspace_halfwidth(d);
  const double sigma = cfg.local_sigma_scale * half;

  const int m = cfg.n_uniform + cfg.n_local;
  Eigen::MatrixXd candidates(m, d);
  for (int i = 0; i < cfg.n_uniform; ++i)
    for (int j = 0; j < d; ++j) candidates(i, j) = uniform(rng, -half, half);
  for (int i = 0; i < cfg.n_local; ++i)
    for (int j = 0; j < d; ++j) {
      const double v = incumbent[j] + sigma * standard_normal(rng);
      candidates(cfg.n_uniform + i, j) =
          std::min(std::max(v, -half), half);
    }

  Eigen::VectorXd means, stds;
  model.posterior(candidates, means, stds);
  const double root_kappa = std::sqrt(kappa);
  int best = 0;
  double best_score = means[0] - root_kappa * stds[0];
  for (int i = 1; i < m; ++i) {
    const double score = means[i] - root_kappa * stds[i];
    if (score < best_score) {  // strict: ties keep the earliest candidate
      best_score = score;
      best = i;
    }
  }
  return candidates.row(best).transpose();
}

}  // namespace dsebo
