#include "dsebo/surrogate.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"

namespace dsebo {

namespace {

constexpr double kLogLengthscaleMin = -7.0;   // ~9e-4
constexpr double kLogLengthscaleMax = 10.0;   // ~2.2e4
constexpr double kLogSignalVarMin = -14.0;    // ~8e-7
constexpr double kLogSignalVarMax = 14.0;

double clampd(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Pairwise squared distances between the rows of X.
Eigen::MatrixXd pairwise_sqdist(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, X.rows()) +
                       sq.transpose().replicate(X.rows(), 1) -
                       2.0 * (X * X.transpose());
  return d2.cwiseMax(0.0);
}

// Squared distances between the rows of X (n x d) and the rows of Z (m x d).
Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& X,
                             const Eigen::MatrixXd& Z) {
  const Eigen::VectorXd xs = X.rowwise().squaredNorm();
  const Eigen::VectorXd zs = Z.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = xs.replicate(1, Z.rows()) +
                       zs.transpose().replicate(X.rows(), 1) -
                       2.0 * (X * Z.transpose());
  return d2.cwiseMax(0.0);
}

struct Standardized {
  Eigen::VectorXd y;
  double mean = 0.0;
  double std = 1.0;
};

Standardized standardize(const Eigen::Ref<const Eigen::VectorXd>& raw) {
  Standardized s;
  s.mean = raw.mean();
  const double var = (raw.array() - s.mean).square().mean();
  s.std = var > 1e-24 ? std::sqrt(var) : 1.0;  // constant-target guard
  s.y = (raw.array() - s.mean) / s.std;
  return s;
}

struct Factorization {
  Eigen::MatrixXd chol;   // lower triangular
  Eigen::VectorXd alpha;  // (K + noise I)^-1 y
  double jitter = 0.0;
  double lml = 0.0;
};

// Cholesky with the jitter escalation ladder 1e-10 .. 1e-4 (x10 per step).
std::optional<Factorization> try_factorize(const Eigen::MatrixXd& kernel,
                                           const Eigen::VectorXd& y,
                                           double noise_variance) {
  const Eigen::Index n = kernel.rows();
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd a = kernel;
    a.diagonal().array() += noise_variance + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      Factorization f;
      f.chol = llt.matrixL();
      f.alpha = llt.solve(y);
      f.jitter = jitter;
      f.lml = -0.5 * y.dot(f.alpha) -
              f.chol.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) *
                  std::log(2.0 * std::numbers::pi);
      return f;
    }
    if (jitter >= kMaxJitter) return std::nullopt;
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
  }
}

Factorization factorize_or_throw(const Eigen::MatrixXd& kernel,
                                 const Eigen::VectorXd& y,
                                 double noise_variance) {
  auto f = try_factorize(kernel, y, noise_variance);
  if (!f)
    throw NumericalError(
        "GP factorization failed after jitter escalation to 1e-4");
  return *f;
}

// LML (and its gradient w.r.t. log lengthscale and log signal variance)
// as a function of hyperparameters, with distances precomputed once.
class LmlObjective {
public:
  LmlObjective(const Eigen::Ref<const Eigen::MatrixXd>& X,
               Eigen::VectorXd y, double noise_variance)
      : sqdist_(pairwise_sqdist(X)), y_(std::move(y)),
        noise_(noise_variance) {}

  Eigen::MatrixXd kernel(double log_l, double log_sf2) const {
    const double l2 = std::exp(2.0 * log_l);
    const double sf2 = std::exp(log_sf2);
    return (sqdist_ / (-2.0 * l2)).array().exp().matrix() * sf2;
  }

  std::optional<double> value(double log_l, double log_sf2) const {
    auto f = try_factorize(kernel(log_l, log_sf2), y_, noise_);
    if (!f) return std::nullopt;
    return f->lml;
  }

  // d LML / d theta_j = 1/2 sum((alpha alpha^T - A^-1) .* dA/dtheta_j)
  std::optional<std::pair<double, Eigen::Vector2d>> value_and_grad(
      double log_l, double log_sf2) const {
    const Eigen::MatrixXd kf = kernel(log_l, log_sf2);
    auto f = try_factorize(kf, y_, noise_);
    if (!f) return std::nullopt;
    const Eigen::Index n = y_.size();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd a_inv =
        f->chol.triangularView<Eigen::Lower>()
            .transpose()
            .solve(f->chol.triangularView<Eigen::Lower>().solve(identity));
    const Eigen::MatrixXd b =
        f->alpha * f->alpha.transpose() - a_inv;
    const double l2 = std::exp(2.0 * log_l);
    // dA/dlog l = K_f .* sqdist / l^2 ; dA/dlog sf2 = K_f
    const double g_logl =
        0.5 * (b.array() * kf.array() * sqdist_.array()).sum() / l2;
    const double g_logsf2 = 0.5 * (b.array() * kf.array()).sum();
    return std::make_pair(f->lml, Eigen::Vector2d(g_logl, g_logsf2));
  }

private:
  Eigen::MatrixXd sqdist_;
  Eigen::VectorXd y_;
  double noise_;
};

struct SearchResult {
  double log_l = 0.0;
  double log_sf2 = 0.0;
  double lml = -std::numeric_limits<double>::infinity();
};

Eigen::Vector2d clamp_point(Eigen::Vector2d p) {
  p[0] = clampd(p[0], kLogLengthscaleMin, kLogLengthscaleMax);
  p[1] = clampd(p[1], kLogSignalVarMin, kLogSignalVarMax);
  return p;
}

// Gradient ascent with backtracking line search, in log space.
SearchResult local_search(const LmlObjective& obj, Eigen::Vector2d start,
                          int max_steps) {
  SearchResult best;
  start = clamp_point(start);
  auto eval0 = obj.value_and_grad(start[0], start[1]);
  if (!eval0) return best;
  Eigen::Vector2d theta = start;
  double fval = eval0->first;
  Eigen::Vector2d grad = eval0->second;
  best = {theta[0], theta[1], fval};

  for (int step = 0; step < max_steps; ++step) {
    const double gmax = grad.cwiseAbs().maxCoeff();
    if (gmax < 1e-4 * std::max(1.0, std::abs(fval))) break;
    const Eigen::Vector2d dir = grad / std::max(1.0, gmax);
    double step_size = 1.0;
    bool improved = false;
    while (step_size >= 1e-4) {
      const Eigen::Vector2d cand = clamp_point(theta + step_size * dir);
      auto v = obj.value(cand[0], cand[1]);
      if (v && *v > fval + 1e-10) {
        theta = cand;
        fval = *v;
        improved = true;
        break;
      }
      step_size *= 0.5;
    }
    if (!improved) break;
    auto e = obj.value_and_grad(theta[0], theta[1]);
    if (!e) break;
    fval = e->first;
    grad = e->second;
    if (fval > best.lml) best = {theta[0], theta[1], fval};
  }
  if (fval > best.lml) best = {theta[0], theta[1], fval};
  return best;
}

}  // namespace

void KernelParams::validate() const {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
    throw UsageError("kernel lengthscale must be positive");
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
    throw UsageError("kernel signal variance must be positive");
  if (!(noise_variance >= kMinNoiseVariance) || !std::isfinite(noise_variance))
    throw UsageError("kernel noise variance below the 1e-10 floor");
}

KernelParams default_params(int dim, double noise_variance) {
  KernelParams p;
  p.lengthscale = std::sqrt(static_cast<double>(std::max(dim, 1)));
  p.signal_variance = 1.0;
  p.noise_variance = noise_variance;
  return p;
}

double rbf_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  const KernelParams& params) {
  params.validate();
  if (x.size() != y.size()) throw UsageError("rbf_kernel: length mismatch");
  const double d2 = (x - y).squaredNorm();
  return params.signal_variance *
         std::exp(-d2 / (2.0 * params.lengthscale * params.lengthscale));
}

GpModel::GpModel(Eigen::MatrixXd train_inputs, Eigen::VectorXd train_targets_std,
                 double target_mean, double target_std, KernelParams params,
                 double jitter, Eigen::MatrixXd chol, Eigen::VectorXd alpha,
                 double log_marginal)
    : inputs_(std::move(train_inputs)), targets_(std::move(train_targets_std)),
      target_mean_(target_mean), target_std_(target_std), params_(params),
      jitter_(jitter), chol_(std::move(chol)), alpha_(std::move(alpha)),
      log_marginal_(log_marginal) {}

std::pair<double, double> GpModel::posterior(const Eigen::VectorXd& z) const {
  if (z.size() != inputs_.cols())
    throw UsageError("posterior: query dimension mismatch");
  Eigen::VectorXd means(1), stds(1);
  Eigen::MatrixXd q(1, z.size());
  q.row(0) = z.transpose();
  posterior(q, means, stds);
  return {means[0], stds[0]};
}

void GpModel::posterior(const Eigen::MatrixXd& Z, Eigen::VectorXd& means,
                        Eigen::VectorXd& stds) const {
  if (Z.cols() != inputs_.cols())
    throw UsageError("posterior: query dimension mismatch");
  const double l2 = params_.lengthscale * params_.lengthscale;
  const Eigen::MatrixXd kstar =
      (cross_sqdist(inputs_, Z) / (-2.0 * l2)).array().exp().matrix() *
      params_.signal_variance;  // n x m
  means = target_mean_ +
          (target_std_ * (kstar.transpose() * alpha_).array());
  const Eigen::MatrixXd v =
      chol_.triangularView<Eigen::Lower>().solve(kstar);  // n x m
  const Eigen::ArrayXd var =
      (params_.signal_variance - v.colwise().squaredNorm().transpose().array())
          .max(0.0);
  stds = (target_std_ * var.sqrt()).matrix();
}

namespace {

GpModel build_model_impl(const SubspaceDataset& data,
                         const KernelParams& params, bool standardize_targets) {
  params.validate();
  if (data.size() == 0) throw DataError("GP fit requires a nonempty dataset");
  if (!data.values().allFinite())
    throw DataError("GP fit: non-finite target value");
  Standardized s;
  if (standardize_targets) {
    s = standardize(data.values());
  } else {
    s.y = data.values();
  }
  const Eigen::MatrixXd X = data.points();
  const double l2 = params.lengthscale * params.lengthscale;
  const Eigen::MatrixXd kernel =
      (pairwise_sqdist(X) / (-2.0 * l2)).array().exp().matrix() *
      params.signal_variance;
  Factorization f = factorize_or_throw(kernel, s.y, params.noise_variance);
  return GpModel(X, s.y, s.mean, s.std, params, f.jitter, std::move(f.chol),
                 std::move(f.alpha), f.lml);
}

}  // namespace

GpModel build_gp_model(const SubspaceDataset& data, const KernelParams& params,
                       bool standardize) {
  return build_model_impl(data, params, standardize);
}

double log_marginal_likelihood(const SubspaceDataset& data,
                               const KernelParams& params) {
  return build_model_impl(data, params, true).log_marginal();
}

std::pair<double, Eigen::Vector2d> log_marginal_likelihood_grad(
    const SubspaceDataset& data, const KernelParams& params) {
  params.validate();
  if (data.size() == 0) throw DataError("GP fit requires a nonempty dataset");
  const Standardized s = standardize(data.values());
  LmlObjective obj(data.points(), s.y, params.noise_variance);
  auto res = obj.value_and_grad(std::log(params.lengthscale),
                                std::log(params.signal_variance));
  if (!res)
    throw NumericalError(
        "GP factorization failed after jitter escalation to 1e-4");
  return *res;
}

GpModel fit_gp(const SubspaceDataset& data,
               const std::optional<KernelParams>& warm,
               const FitOptions& opts) {
  if (data.size() == 0) throw DataError("GP fit requires a nonempty dataset");
  if (!data.values().allFinite())
    throw DataError("GP fit: non-finite target value");
  const double noise =
      warm ? warm->noise_variance : kDefaultNoiseVariance;
  const Standardized s = standardize(data.values());
  LmlObjective obj(data.points(), s.y, noise);

  const KernelParams defaults = default_params(data.dim(), noise);
  const Eigen::Vector2d default_start(std::log(defaults.lengthscale),
                                      std::log(defaults.signal_variance));
  std::vector<Eigen::Vector2d> starts;
  if (warm) {
    warm->validate();
    starts.emplace_back(std::log(warm->lengthscale),
                        std::log(warm->signal_variance));
  } else {
    starts.push_back(default_start);
  }
  auto rng = substream(opts.seed, Stream::gp_restarts);
  for (int r = 0; r < opts.restarts; ++r)
    starts.push_back(clamp_point(
        default_start + Eigen::Vector2d(2.0 * standard_normal(rng),
                                        2.0 * standard_normal(rng))));

  SearchResult best;
  for (const auto& start : starts) {
    const SearchResult res = local_search(obj, start, opts.max_steps);
    if (res.lml > best.lml) best = res;
  }
  // The defaults always take part in the comparison, so the fitted LML can
  // never fall below theirs even on a warm-only search.
  if (auto at_default = obj.value(default_start[0], default_start[1])) {
    if (*at_default > best.lml) {
      const SearchResult res = local_search(obj, default_start, opts.max_steps);
      best = res.lml > *at_default
                 ? res
                 : SearchResult{default_start[0], default_start[1],
                                *at_default};
    }
  }
  if (!std::isfinite(best.lml))
    throw NumericalError("GP fit: no hyperparameter start factorized");

  KernelParams fitted;
  fitted.lengthscale = std::exp(best.log_l);
  fitted.signal_variance = std::exp(best.log_sf2);
  fitted.noise_variance = noise;
  return build_model_impl(data, fitted, true);
}

GpFitter::GpFitter(std::uint64_t seed, int full_refit_period)
    : seed_(seed), period_(std::max(1, full_refit_period)) {}

GpModel GpFitter::fit(const SubspaceDataset& data) {
  const bool full = count_ % period_ == 0;
  FitOptions opts;
  opts.restarts = full ? 3 : 0;
  opts.seed = mix_seed(seed_, static_cast<std::uint64_t>(count_));
  opts.max_steps = full ? 40 : 15;
  ++count_;
  GpModel model = fit_gp(data, warm_, opts);
  warm_ = model.params();
  return model;
}

}  // namespace dsebo
