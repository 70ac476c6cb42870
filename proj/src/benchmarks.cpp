#include "dsebo/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "dsebo/errors.hpp"

namespace dsebo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMichalewiczSteepness = 10;  // the usual m = 10

double sphere(const Eigen::VectorXd& x) { return x.squaredNorm(); }

double rosenbrock(const Eigen::VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double levy(const Eigen::VectorXd& x) {
  const Eigen::ArrayXd w = 1.0 + (x.array() - 1.0) / 4.0;
  const double s1 = std::sin(kPi * w[0]);
  double s = s1 * s1;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double t = std::sin(kPi * w[i] + 1.0);
    s += (w[i] - 1.0) * (w[i] - 1.0) * (1.0 + 10.0 * t * t);
  }
  const double wd = w[x.size() - 1];
  const double t = std::sin(2.0 * kPi * wd);
  s += (wd - 1.0) * (wd - 1.0) * (1.0 + t * t);
  return s;
}

double griewank(const Eigen::VectorXd& x) {
  double prod = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  return x.squaredNorm() / 4000.0 - prod + 1.0;
}

double dixon_price(const Eigen::VectorXd& x) {
  double s = (x[0] - 1.0) * (x[0] - 1.0);
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    const double t = 2.0 * x[i] * x[i] - x[i - 1];
    s += static_cast<double>(i + 1) * t * t;
  }
  return s;
}

double michalewicz(const Eigen::VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t =
        std::sin(static_cast<double>(i + 1) * x[i] * x[i] / kPi);
    s -= std::sin(x[i]) * std::pow(t, 2 * kMichalewiczSteepness);
  }
  return s;
}

}  // namespace

BaseFunction::BaseFunction(Kind kind, std::string name, int dim, double lo,
                           double hi)
    : kind_(kind), name_(std::move(name)), dim_(dim), lo_(lo), hi_(hi) {}

BaseFunction BaseFunction::make(const std::string& name, int dim) {
  if (dim < 1) throw ConfigError("base function dimension must be positive");
  if (name == "sphere")
    return BaseFunction(Kind::sphere, name, dim, -5.12, 5.12);
  if (name == "rosenbrock")
    return BaseFunction(Kind::rosenbrock, name, dim, -2.048, 2.048);
  if (name == "levy") return BaseFunction(Kind::levy, name, dim, -10.0, 10.0);
  if (name == "griewank")
    return BaseFunction(Kind::griewank, name, dim, -600.0, 600.0);
  if (name == "dixon_price")
    return BaseFunction(Kind::dixon_price, name, dim, -10.0, 10.0);
  if (name == "michalewicz")
    return BaseFunction(Kind::michalewicz, name, dim, 0.0, kPi);
  throw ConfigError("unknown base function: " + name);
}

const std::vector<std::string>& base_function_names() {
  static const std::vector<std::string> names = {
      "sphere", "rosenbrock", "levy", "griewank", "dixon_price", "michalewicz"};
  return names;
}

Eigen::VectorXd BaseFunction::to_canonical(const Eigen::VectorXd& u) const {
  const double center = 0.5 * (lo_ + hi_);
  const double half = 0.5 * (hi_ - lo_);
  return (center + half * u.array()).matrix();
}

double BaseFunction::eval_canonical(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw UsageError("eval: dimension mismatch");
  switch (kind_) {
    case Kind::sphere: return sphere(x);
    case Kind::rosenbrock: return rosenbrock(x);
    case Kind::levy: return levy(x);
    case Kind::griewank: return griewank(x);
    case Kind::dixon_price: return dixon_price(x);
    case Kind::michalewicz: return michalewicz(x);
  }
  throw UsageError("eval: unreachable");
}

double BaseFunction::eval_base(const Eigen::VectorXd& u) const {
  if (u.size() != dim_) throw UsageError("eval_base: dimension mismatch");
  if ((u.array().abs() > 1.0 + 1e-12).any())
    throw UsageError("eval_base: point outside the unit box");
  return eval_canonical(to_canonical(u));
}

std::optional<double> BaseFunction::known_minimum() const {
  if (kind_ == Kind::michalewicz) return std::nullopt;
  return 0.0;
}

std::optional<Eigen::VectorXd> BaseFunction::known_optimizer_unit() const {
  const double center = 0.5 * (lo_ + hi_);
  const double half = 0.5 * (hi_ - lo_);
  Eigen::VectorXd canonical(dim_);
  switch (kind_) {
    case Kind::sphere:
    case Kind::griewank:
      canonical.setZero();
      break;
    case Kind::rosenbrock:
    case Kind::levy:
      canonical.setOnes();
      break;
    case Kind::dixon_price:
      for (int i = 0; i < dim_; ++i) {
        const double p = std::pow(2.0, static_cast<double>(i + 1));
        canonical[i] = std::pow(2.0, -(p - 2.0) / p);
      }
      break;
    case Kind::michalewicz:
      return std::nullopt;
  }
  return ((canonical.array() - center) / half).matrix();
}

HighDimFunction::HighDimFunction(BaseFunction base, int ambient_dim,
                                 double shift, double penalty_constant)
    : base_(std::move(base)), ambient_dim_(ambient_dim), shift_(shift),
      penalty_constant_(penalty_constant) {
  if (ambient_dim_ <= base_.dim())
    throw ConfigError("high-dim wrapper: D must exceed the base dimension");
  if (!(penalty_constant_ > 0.0))
    throw ConfigError("high-dim wrapper: K must be positive");
}

double HighDimFunction::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != ambient_dim_)
    throw UsageError("high-dim eval: dimension mismatch");
  const int df = base_.dim();
  const Eigen::VectorXd head =
      (x.head(df).array() - shift_).max(-1.0).min(1.0).matrix();
  const double tail =
      (x.tail(ambient_dim_ - df).array() - shift_).square().sum();
  return base_.eval_base(head) - tail / penalty_constant_;
}

double HighDimFunction::tail_penalty_bound() const {
  return 4.0 * static_cast<double>(ambient_dim_ - base_.dim()) /
         penalty_constant_;
}

HighDimFunction make_high_dim(BaseFunction base, int ambient_dim, double shift,
                              double penalty_constant) {
  return HighDimFunction(std::move(base), ambient_dim, shift,
                         penalty_constant);
}

std::vector<double> simple_regret(const RunTrace& trace, double f_star,
                                  double slack) {
  std::vector<double> out;
  out.reserve(trace.rows.size());
  for (const TraceRow& row : trace.rows) {
    if (f_star > row.value + slack)
      throw UsageError("simple_regret: f_star above an observed value");
    out.push_back(row.best - f_star);
  }
  return out;
}

}  // namespace dsebo
