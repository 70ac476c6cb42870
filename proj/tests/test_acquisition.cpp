#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dsebo/acquisition.hpp"
#include "dsebo/embedding.hpp"
#include "dsebo/errors.hpp"
#include "dsebo/rng.hpp"

using namespace dsebo;

namespace {

// Rebuilds the candidate set propose() draws from a copy of the rng state:
// n_uniform uniform rows first, then n_local clamped perturbations.
Eigen::MatrixXd replay_candidates(const Eigen::VectorXd& incumbent, int d,
                                  std::mt19937_64 rng,
                                  const AcquisitionConfig& cfg) {
  const double half = subspace_halfwidth(d);
  const double sigma = cfg.local_sigma_scale * half;
  Eigen::MatrixXd candidates(cfg.n_uniform + cfg.n_local, d);
  for (int i = 0; i < cfg.n_uniform; ++i)
    for (int j = 0; j < d; ++j) candidates(i, j) = uniform(rng, -half, half);
  for (int i = 0; i < cfg.n_local; ++i)
    for (int j = 0; j < d; ++j) {
      const double v = incumbent[j] + sigma * standard_normal(rng);
      candidates(cfg.n_uniform + i, j) = std::min(std::max(v, -half), half);
    }
  return candidates;
}

GpModel one_point_model(const Eigen::VectorXd& z0, double y0) {
  SubspaceDataset data(static_cast<int>(z0.size()));
  data.append(z0, y0);
  return build_gp_model(data, KernelParams{}, /*standardize=*/false);
}

}  // namespace

TEST_CASE("kappa schedule closed form") {
  CHECK(kappa_schedule(1, 5, 0.1) ==
        doctest::Approx(8.819446615797782).epsilon(1e-12));
  // delta -> 1 limit at t = 1, d = 1 approaches 2 log(pi^2/6)
  CHECK(kappa_schedule(1, 1, 0.999999) ==
        doctest::Approx(0.9954006049414906).epsilon(1e-5));
  CHECK_THROWS_AS(kappa_schedule(0, 5, 0.1), UsageError);
  CHECK_THROWS_AS(kappa_schedule(1, 0, 0.1), UsageError);
  CHECK_THROWS_AS(kappa_schedule(1, 1, 1.5), UsageError);
}

TEST_CASE("kappa schedule is strictly increasing in t") {
  for (int d : {5, 100}) {
    double prev = kappa_schedule(1, d, 0.1);
    CHECK(prev > 0.0);
    for (int t = 2; t <= 500; ++t) {
      const double k = kappa_schedule(t, d, 0.1);
      CHECK(k > prev);
      prev = k;
    }
  }
}

TEST_CASE("lcb closed form") {
  CHECK(lcb(1.0, 2.0, 4.0) == doctest::Approx(-3.0).epsilon(1e-15));
  CHECK(lcb(7.5, 0.0, 100.0) == 7.5);
  CHECK(lcb(7.5, 3.0, 0.0) == 7.5);
}

TEST_CASE("equal-mean candidates: larger kappa never picks lower std") {
  std::vector<double> stds = {0.2, 1.7, 0.9, 1.7, 0.1};
  const auto chosen = [&](double kappa) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < stds.size(); ++i)
      if (lcb(0.0, stds[i], kappa) < lcb(0.0, stds[best], kappa)) best = i;
    return best;
  };
  const std::size_t low = chosen(1e-12);
  const std::size_t high = chosen(4.0);
  CHECK(stds[high] >= stds[low]);
  CHECK(high == 1);  // earliest of the tied maxima
}

TEST_CASE("propose is deterministic and in-box") {
  Eigen::VectorXd z0(3);
  z0 << 0.5, -1.0, 0.2;
  const GpModel model = one_point_model(z0, -2.0);
  AcquisitionConfig cfg;
  cfg.n_uniform = 200;
  cfg.n_local = 200;
  auto rng_a = substream(11, 0);
  auto rng_b = substream(11, 0);
  const Eigen::VectorXd a = propose(model, z0, 2.0, rng_a, cfg);
  const Eigen::VectorXd b = propose(model, z0, 2.0, rng_b, cfg);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.cwiseAbs().maxCoeff() <= subspace_halfwidth(3));
}

TEST_CASE("propose returns the candidate-set LCB argmin") {
  Eigen::VectorXd z0(2);
  z0 << 0.3, 0.6;
  const GpModel model = one_point_model(z0, -4.0);
  AcquisitionConfig cfg;
  cfg.n_uniform = 150;
  cfg.n_local = 150;
  const double kappa = 3.0;

  auto rng = substream(23, 0);
  const Eigen::MatrixXd candidates = replay_candidates(z0, 2, rng, cfg);
  const Eigen::VectorXd chosen = propose(model, z0, kappa, rng, cfg);

  const auto [cm, cs] = model.posterior(chosen);
  const double chosen_score = lcb(cm, cs, kappa);
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    const auto [m, s] = model.posterior(candidates.row(i).transpose());
    CHECK(chosen_score <= lcb(m, s, kappa) + 1e-12);
  }
}

TEST_CASE("small kappa exploits near a deep incumbent") {
  Eigen::VectorXd z0(2);
  z0 << 0.4, -0.3;
  const GpModel model = one_point_model(z0, -5.0);  // far below the 0 prior
  auto rng = substream(3, 0);
  const Eigen::VectorXd prop = propose(model, z0, 1e-9, rng);
  CHECK((prop - z0).norm() <= 0.3);  // inside the local-perturbation cloud
}

TEST_CASE("huge kappa explores away from the incumbent") {
  Eigen::VectorXd z0(2);
  z0 << 0.0, 0.0;
  const GpModel model = one_point_model(z0, -5.0);
  auto rng = substream(8, 0);
  const Eigen::VectorXd prop = propose(model, z0, 1e6, rng);
  const auto [pm, ps] = model.posterior(prop);
  const auto [im, is] = model.posterior(z0);
  CHECK(ps >= is);
}

TEST_CASE("propose rejects mismatched incumbents") {
  Eigen::VectorXd z0(2);
  z0 << 0.1, 0.1;
  const GpModel model = one_point_model(z0, 1.0);
  auto rng = substream(1, 0);
  Eigen::VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS(propose(model, wrong, 1.0, rng), UsageError);
}
