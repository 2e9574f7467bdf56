#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Core>

#include "zofd/directions.hpp"
#include "zofd/objective.hpp"

namespace zofd {

struct GradEstimate {
  Eigen::VectorXd g;
  std::size_t evals_used = 0;  // ell + 1, or ell when F(x) was supplied
  double base_value = 0.0;     // F(x) used in every difference
};

/// Forward finite-difference surrogate
///   g(x, h, P) = (d / ell) * sum_i (F(x + h p_i) - F(x)) / h * p_i.
/// F(x) is evaluated once, or taken from `cached_fx`. Probes are evaluated
/// in column order and summed in that order.
///
/// Throws ParameterError for h <= 0, DimensionError when P.dim() != x.size(),
/// EvaluationError (with the probe point) on a non-finite value.
GradEstimate forward_fd(const ScalarFunction& f, const Eigen::VectorXd& x, double h,
                        const DirectionMatrix& p, std::optional<double> cached_fx = std::nullopt);

inline GradEstimate forward_fd(const Objective& f, const Eigen::VectorXd& x, double h,
                               const DirectionMatrix& p,
                               std::optional<double> cached_fx = std::nullopt) {
  return forward_fd(f.value, x, h, p, cached_fx);
}

}  // namespace zofd
