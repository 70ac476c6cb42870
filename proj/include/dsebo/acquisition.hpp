#pragma once

#include <Eigen/Core>
#include <random>

#include "dsebo/surrogate.hpp"

namespace dsebo {

struct AcquisitionConfig {
  double delta = 0.1;            // confidence parameter, in (0,1)
  int n_uniform = 1000;          // uniform box candidates
  int n_local = 1000;            // Gaussian perturbations of the incumbent
  double local_sigma_scale = 0.1;  // per-coordinate std = scale * sqrt(d)

  void validate() const;
};

// kappa_t = 2 log(d t^2 pi^2 / (6 delta)); strictly increasing in t.
double kappa_schedule(int t, int d, double delta);

// Lower confidence bound for minimization: mean - sqrt(kappa) * std.
double lcb(double mean, double std, double kappa);

// Scores n_uniform uniform box samples plus n_local clamped Gaussian
// perturbations of the incumbent and returns the candidate minimizing the
// LCB; ties break toward the earliest generated candidate. Deterministic
// given the rng state.
Eigen::VectorXd propose(const GpModel& model, const Eigen::VectorXd& incumbent,
                        double kappa, std::mt19937_64& rng,
                        const AcquisitionConfig& cfg = {});

}  // namespace dsebo
