#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dsebo/embedding.hpp"
#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"
#include "dsebo/surrogate.hpp"

using namespace dsebo;

namespace {

SubspaceDataset random_dataset(int n, int d, std::mt19937_64& rng,
                               double scale = 2.0) {
  SubspaceDataset data(d);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(d);
    for (int j = 0; j < d; ++j) z[j] = uniform(rng, -scale, scale);
    data.append(z, uniform(rng, -3.0, 3.0));
  }
  return data;
}

// Dense-solve reference: kernel entries through the scalar rbf_kernel and a
// full-pivot LU solve, nothing shared with the Cholesky prediction path.
std::pair<double, double> dense_posterior(const SubspaceDataset& data,
                                          const KernelParams& params,
                                          const Eigen::VectorXd& query) {
  const Eigen::Index n = data.size();
  const double mean_y = data.values().mean();
  const double var_y = (data.values().array() - mean_y).square().mean();
  const double std_y = var_y > 1e-24 ? std::sqrt(var_y) : 1.0;
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y[i] = (data.value(i) - mean_y) / std_y;

  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = rbf_kernel(data.point(i), data.point(j), params);
  a.diagonal().array() += params.noise_variance;

  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i)
    kstar[i] = rbf_kernel(data.point(i), query, params);

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  const double mean = mean_y + std_y * kstar.dot(lu.solve(y));
  const double var = params.signal_variance - kstar.dot(lu.solve(kstar));
  return {mean, std_y * std::sqrt(std::max(0.0, var))};
}

}  // namespace

TEST_CASE("rbf kernel closed form") {
  KernelParams p;
  Eigen::VectorXd x(2), y(2);
  x << 1.0, 2.0;
  y << 1.0, 2.0;
  p.signal_variance = 2.5;
  CHECK(rbf_kernel(x, y, p) == doctest::Approx(2.5).epsilon(1e-12));

  p.signal_variance = 1.0;
  p.lengthscale = 1.0;
  y << 1.0, 3.0;  // distance 1
  CHECK(rbf_kernel(x, y, p) ==
        doctest::Approx(0.6065306597126334).epsilon(1e-12));

  auto rng = substream(5, 1);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd a(3), b(3);
    for (int j = 0; j < 3; ++j) {
      a[j] = uniform(rng, -2, 2);
      b[j] = uniform(rng, -2, 2);
    }
    CHECK(rbf_kernel(a, b, p) == rbf_kernel(b, a, p));
  }

  Eigen::VectorXd z3(3);
  z3.setZero();
  CHECK_THROWS_AS(rbf_kernel(x, z3, p), UsageError);
  KernelParams bad;
  bad.lengthscale = 0.0;
  CHECK_THROWS_AS(rbf_kernel(x, y, bad), UsageError);
  bad = KernelParams{};
  bad.noise_variance = 1e-12;  // below the 1e-10 floor
  CHECK_THROWS_AS(rbf_kernel(x, y, bad), UsageError);
}

TEST_CASE("one-point model matches the closed form (unstandardized)") {
  SubspaceDataset data(2);
  Eigen::VectorXd z0(2);
  z0 << 0.4, -0.2;
  const double y0 = -5.0;
  data.append(z0, y0);
  KernelParams p;  // sf2 = 1, noise = 1e-6
  const GpModel model = build_gp_model(data, p, /*standardize=*/false);
  const auto [mean, std] = model.posterior(z0);
  // y0 * sf2 / (sf2 + sn2)
  CHECK(mean == doctest::Approx(-4.999995000005001).epsilon(1e-12));
  CHECK(std >= 0.0);
}

TEST_CASE("duplicate inputs with equal targets fit with tiny variance") {
  SubspaceDataset data(2);
  Eigen::VectorXd z(2);
  z << 0.5, 0.5;
  data.append(z, 2.0);
  data.append(z, 2.0);
  data.append(z, 2.0);
  const GpModel model = fit_gp(data);
  const auto [mean, std] = model.posterior(z);
  CHECK(std * std <= model.params().noise_variance + 1e-6);
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("constant targets trigger the standardization guard") {
  auto rng = substream(9, 2);
  SubspaceDataset data(3);
  for (int i = 0; i < 6; ++i) data.append(sample_subspace_point(3, rng), 4.25);
  const GpModel model = fit_gp(data);
  CHECK(model.target_std() == 1.0);
  CHECK(model.target_mean() == 4.25);
  CHECK(std::isfinite(model.params().lengthscale));
  CHECK(std::isfinite(model.params().signal_variance));
  const auto [mean, std] = model.posterior(data.point(0));
  CHECK(std::isfinite(mean));
  CHECK(std::isfinite(std));
}

TEST_CASE("far queries revert to the prior") {
  auto rng = substream(12, 3);
  SubspaceDataset data = random_dataset(10, 2, rng);
  const GpModel model = fit_gp(data);
  Eigen::VectorXd far(2);
  far << 1e6, -1e6;
  const auto [mean, std] = model.posterior(far);
  CHECK(mean == doctest::Approx(model.target_mean()).epsilon(1e-9));
  const double prior_std =
      model.target_std() * std::sqrt(model.params().signal_variance);
  CHECK(std == doctest::Approx(prior_std).epsilon(1e-9));
}

TEST_CASE("near-interpolation at training points") {
  auto rng = substream(31, 4);
  SubspaceDataset data = random_dataset(12, 2, rng);
  const GpModel model = fit_gp(data);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto [mean, std] = model.posterior(data.point(i));
    CHECK(std::abs(mean - data.value(i)) <= 1e-2 * model.target_std());
  }
}

TEST_CASE("posterior matches the dense-solve reference") {
  auto rng = substream(7, 5);
  for (int instance = 0; instance < 10; ++instance) {
    const int n = 2 + static_cast<int>(uniform01(rng) * 7);  // <= 8
    const int d = 1 + static_cast<int>(uniform01(rng) * 3);  // <= 3
    const SubspaceDataset data = random_dataset(n, d, rng);
    KernelParams p;
    p.lengthscale = uniform(rng, 0.5, 3.0);
    p.signal_variance = uniform(rng, 0.5, 2.0);
    const GpModel model = build_gp_model(data, p);
    for (int q = 0; q < 5; ++q) {
      Eigen::VectorXd query(d);
      for (int j = 0; j < d; ++j) query[j] = uniform(rng, -2.0, 2.0);
      const auto [mean, std] = model.posterior(query);
      const auto [ref_mean, ref_std] = dense_posterior(data, p, query);
      CHECK(mean == doctest::Approx(ref_mean).epsilon(1e-8));
      CHECK(std * std ==
            doctest::Approx(ref_std * ref_std).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("model state reconstructs the kernel system") {
  auto rng = substream(3, 6);
  const SubspaceDataset data = random_dataset(15, 3, rng);
  KernelParams p;
  p.lengthscale = 1.3;
  const GpModel model = build_gp_model(data, p);

  const Eigen::Index n = data.size();
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = rbf_kernel(data.point(i), data.point(j), p);
  a.diagonal().array() += p.noise_variance + model.jitter();

  const Eigen::MatrixXd rebuilt = model.chol() * model.chol().transpose();
  CHECK((rebuilt - a).norm() / a.norm() <= 1e-8);
  CHECK((a * model.alpha() - model.train_targets()).norm() <= 1e-8);
}

TEST_CASE("posterior variance is bounded and shrinks with data") {
  auto rng = substream(44, 7);
  for (int instance = 0; instance < 8; ++instance) {
    SubspaceDataset data = random_dataset(6, 2, rng);
    KernelParams p;
    p.lengthscale = uniform(rng, 0.8, 2.0);
    const GpModel before = build_gp_model(data, p);

    Eigen::VectorXd query(2), extra(2);
    for (int j = 0; j < 2; ++j) {
      query[j] = uniform(rng, -2.0, 2.0);
      extra[j] = uniform(rng, -2.0, 2.0);
    }
    const double var_cap =
        p.signal_variance * before.target_std() * before.target_std() + 1e-8;
    const auto [m0, s0] = before.posterior(query);
    CHECK(s0 * s0 <= var_cap);

    // same params, one more point: variance never increases (compared in
    // standardized units, where both fits share the same kernel)
    const double std_before = s0 / before.target_std();
    data.append(extra, uniform(rng, -3.0, 3.0));
    const GpModel after = build_gp_model(data, p);
    const auto [m1, s1] = after.posterior(query);
    const double std_after = s1 / after.target_std();
    CHECK(std_after * std_after <= std_before * std_before + 1e-8);
  }
}

TEST_CASE("analytic LML gradient matches central differences") {
  auto rng = substream(6, 8);
  for (int instance = 0; instance < 6; ++instance) {
    const SubspaceDataset data = random_dataset(7, 2, rng);
    KernelParams p;
    p.lengthscale = uniform(rng, 0.7, 2.5);
    p.signal_variance = uniform(rng, 0.5, 2.0);
    const auto [value, grad] = log_marginal_likelihood_grad(data, p);
    CHECK(value ==
          doctest::Approx(log_marginal_likelihood(data, p)).epsilon(1e-10));

    const double h = 1e-5;
    for (int axis = 0; axis < 2; ++axis) {
      KernelParams hi = p, lo = p;
      if (axis == 0) {
        hi.lengthscale = std::exp(std::log(p.lengthscale) + h);
        lo.lengthscale = std::exp(std::log(p.lengthscale) - h);
      } else {
        hi.signal_variance = std::exp(std::log(p.signal_variance) + h);
        lo.signal_variance = std::exp(std::log(p.signal_variance) - h);
      }
      const double fd = (log_marginal_likelihood(data, hi) -
                         log_marginal_likelihood(data, lo)) /
                        (2.0 * h);
      CHECK(grad[axis] ==
            doctest::Approx(fd).epsilon(1e-4).scale(std::abs(fd) + 1.0));
    }
  }
}

TEST_CASE("fit never scores below the default parameters") {
  auto rng = substream(10, 9);
  for (int instance = 0; instance < 5; ++instance) {
    const SubspaceDataset data = random_dataset(10, 2, rng);
    const GpModel model = fit_gp(data);
    const double at_default = log_marginal_likelihood(data, default_params(2));
    CHECK(model.log_marginal() >= at_default - 1e-9);
  }
}

TEST_CASE("fit is deterministic") {
  auto rng = substream(2, 10);
  const SubspaceDataset data = random_dataset(9, 3, rng);
  FitOptions opts;
  opts.seed = 1234;
  const GpModel a = fit_gp(data, {}, opts);
  const GpModel b = fit_gp(data, {}, opts);
  CHECK(a.params().lengthscale == b.params().lengthscale);
  CHECK(a.params().signal_variance == b.params().signal_variance);
  CHECK(a.log_marginal() == b.log_marginal());
}

TEST_CASE("fitter alternates warm and full refits deterministically") {
  auto rng = substream(1, 11);
  SubspaceDataset data = random_dataset(5, 2, rng);
  GpFitter fa(77), fb(77);
  for (int i = 0; i < 4; ++i) {
    const GpModel ma = fa.fit(data);
    const GpModel mb = fb.fit(data);
    CHECK(ma.params().lengthscale == mb.params().lengthscale);
    CHECK(ma.log_marginal() == mb.log_marginal());
    data.append(sample_subspace_point(2, rng), uniform(rng, -3.0, 3.0));
  }
  CHECK(fa.fit_count() == 4);
}

TEST_CASE("degenerate inputs raise data errors") {
  SubspaceDataset empty(2);
  CHECK_THROWS_AS(fit_gp(empty), DataError);
  CHECK_THROWS_AS(build_gp_model(empty, KernelParams{}), DataError);
  Eigen::VectorXd q(2);
  q.setZero();
  SubspaceDataset one(2);
  one.append(q, 1.0);
  const GpModel model = build_gp_model(one, KernelParams{});
  Eigen::VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(model.posterior(wrong), UsageError);
}
