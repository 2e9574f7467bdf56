#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace zofd {

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;
using GradientFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Serializable description of a problem instance: constructor name,
/// dimension, RNG seed and named numeric parameters.
struct ProblemSpec {
  std::string name;
  int dim = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const;
};

/// Scalar objective on R^d. Instances are immutable after construction;
/// `value` and `gradient` are safe to call concurrently when `pure` is set.
struct Objective {
  std::string name;
  int dim = 0;
  ScalarFunction value;
  GradientFunction gradient;  // empty when no analytic gradient is known
  std::optional<double> f_min;
  // Known minimiser; only used by tests and validation, never by optimizers.
  std::optional<Eigen::VectorXd> minimizer;
  Eigen::VectorXd x0_default;
  bool pure = true;
  ProblemSpec spec;

  double operator()(const Eigen::VectorXd& x) const { return value(x); }
  bool has_gradient() const noexcept { return static_cast<bool>(gradient); }
};

}  // namespace zofd
