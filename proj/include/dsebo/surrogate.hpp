#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>

#include "dsebo/embedding.hpp"

namespace dsebo {

inline constexpr double kDefaultNoiseVariance = 1e-6;
inline constexpr double kMinNoiseVariance = 1e-10;
inline constexpr double kMaxJitter = 1e-4;

// Isotropic RBF kernel hyperparameters.
struct KernelParams {
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = kDefaultNoiseVariance;

  void validate() const;
};

// Scale-aware defaults: lengthscale sqrt(d), unit signal variance.
KernelParams default_params(int dim,
                            double noise_variance = kDefaultNoiseVariance);

// sigma_f^2 * exp(-||x - y||^2 / (2 l^2)).
double rbf_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  const KernelParams& params);

// Fitted zero-mean GP posterior state over one dataset. Targets are
// standardized internally; queries are de-standardized on the way out.
// Immutable after construction and safe to query concurrently.
class GpModel {
public:
  GpModel(Eigen::MatrixXd train_inputs, Eigen::VectorXd train_targets_std,
          double target_mean, double target_std, KernelParams params,
          double jitter, Eigen::MatrixXd chol, Eigen::VectorXd alpha,
          double log_marginal);

  const KernelParams& params() const { return params_; }
  const Eigen::MatrixXd& train_inputs() const { return inputs_; }
  const Eigen::VectorXd& train_targets() const { return targets_; }
  double target_mean() const { return target_mean_; }
  double target_std() const { return target_std_; }
  // Lower-triangular Cholesky factor of K + (noise + jitter) I.
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  double log_marginal() const { return log_marginal_; }
  int dim() const { return static_cast<int>(inputs_.cols()); }
  Eigen::Index size() const { return inputs_.rows(); }

  // Predictive (mean, std) at one query point, de-standardized. Variance is
  // clamped at zero before the square root.
  std::pair<double, double> posterior(const Eigen::VectorXd& z) const;

  // Batch form over the rows of Z (m x d).
  void posterior(const Eigen::MatrixXd& Z, Eigen::VectorXd& means,
                 Eigen::VectorXd& stds) const;

private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;  // standardized
  double target_mean_;
  double target_std_;
  KernelParams params_;
  double jitter_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double log_marginal_;
};

// Factorizes the kernel matrix at the given hyperparameters and assembles
// the posterior state. Escalates jitter from 1e-10 to 1e-4 on Cholesky
// failure, then throws NumericalError. With standardize=false the targets
// are used as-is (target_mean 0, target_std 1).
GpModel build_gp_model(const SubspaceDataset& data, const KernelParams& params,
                       bool standardize = true);

// Log marginal likelihood of the standardized targets at the given
// hyperparameters (same standardization rule as build_gp_model).
double log_marginal_likelihood(const SubspaceDataset& data,
                               const KernelParams& params);

// LML plus its analytic gradient w.r.t. (log lengthscale, log signal
// variance), the quantities the fit ascends.
std::pair<double, Eigen::Vector2d> log_marginal_likelihood_grad(
    const SubspaceDataset& data, const KernelParams& params);

struct FitOptions {
  int restarts = 3;        // extra random log-space starts
  std::uint64_t seed = 0;  // stream for the random starts
  int max_steps = 40;      // gradient-ascent cap per start
};

// Hyperparameter fit by log-marginal-likelihood maximization over
// (log lengthscale, log signal variance); noise variance is held fixed.
// The default parameters are always part of the comparison, so the returned
// model's LML is never below theirs. Deterministic given (data, warm, seed).
GpModel fit_gp(const SubspaceDataset& data,
               const std::optional<KernelParams>& warm = {},
               const FitOptions& opts = {});

// Refit scheduler: a full multi-start search every `full_refit_period`-th
// call, a warm-started single local search otherwise.
class GpFitter {
public:
  explicit GpFitter(std::uint64_t seed, int full_refit_period = 25);

  GpModel fit(const SubspaceDataset& data);
  int fit_count() const { return count_; }

private:
  std::uint64_t seed_;
  int period_;
  int count_ = 0;
  std::optional<KernelParams> warm_;
};

}  // namespace dsebo
