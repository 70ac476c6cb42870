#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "dsebo/trace.hpp"

namespace dsebo {

// A standard test function on its canonical domain, exposed over the unit
// box [-1,1]^d through a per-coordinate affine map.
class BaseFunction {
public:
  // Registry names: sphere, rosenbrock, levy, griewank, dixon_price,
  // michalewicz. Unknown names raise ConfigError.
  static BaseFunction make(const std::string& name, int dim);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double canonical_lo() const { return lo_; }
  double canonical_hi() const { return hi_; }

  // Affine image of u in [-1,1]^d on the canonical domain.
  Eigen::VectorXd to_canonical(const Eigen::VectorXd& u) const;

  double eval_canonical(const Eigen::VectorXd& x) const;

  // Evaluation over the unit box; rejects points outside it (1e-12 slop).
  double eval_base(const Eigen::VectorXd& u) const;

  // Closed-form global minimum value / unit-box optimizer, where known
  // (all but michalewicz).
  std::optional<double> known_minimum() const;
  std::optional<Eigen::VectorXd> known_optimizer_unit() const;

private:
  enum class Kind { sphere, rosenbrock, levy, griewank, dixon_price, michalewicz };
  BaseFunction(Kind kind, std::string name, int dim, double lo, double hi);

  Kind kind_;
  std::string name_;
  int dim_;
  double lo_;
  double hi_;
};

const std::vector<std::string>& base_function_names();

// F_c(x) = f(clamp(x_{1:d_f} - c)) - K^-1 sum_{i>d_f} (x_i - c)^2.
// The head shift is clamped back into the unit box; the optimum sits at
// head = c + u*, tail = c. Pure and reentrant.
class HighDimFunction {
public:
  HighDimFunction(BaseFunction base, int ambient_dim, double shift,
                  double penalty_constant);

  int ambient_dim() const { return ambient_dim_; }
  const BaseFunction& base() const { return base_; }
  double shift() const { return shift_; }
  double penalty_constant() const { return penalty_constant_; }

  double operator()(const Eigen::VectorXd& x) const;

  // 4 (D - d_f) / K, the worst-case tail contribution over [-1,1]^D.
  double tail_penalty_bound() const;

private:
  BaseFunction base_;
  int ambient_dim_;
  double shift_;
  double penalty_constant_;
};

HighDimFunction make_high_dim(BaseFunction base, int ambient_dim, double shift,
                              double penalty_constant);

// Per-iteration best-so-far minus f_star. `slack` widens the precondition
// f_star <= min(trace) + slack to cover the tail-penalty dip of F_c.
std::vector<double> simple_regret(const RunTrace& trace, double f_star,
                                  double slack = 1e-9);

}  // namespace dsebo
