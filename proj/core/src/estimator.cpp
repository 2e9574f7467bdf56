#include "zofd/estimator.hpp"

#include <cmath>
#include <string>

#include "zofd/errors.hpp"

namespace zofd {

GradEstimate forward_fd(const ScalarFunction& f, const Eigen::VectorXd& x, double h,
                        const DirectionMatrix& p, std::optional<double> cached_fx) {
  if (!(h > 0.0)) throw ParameterError("forward_fd: h must be positive");
  if (p.dim() != x.size()) {
    throw DimensionError("forward_fd: direction dimension " + std::to_string(p.dim()) +
                         " != point dimension " + std::to_string(x.size()));
  }

  GradEstimate out;
  std::size_t evals = 0;
  double fx = 0.0;
  if (cached_fx) {
    fx = *cached_fx;
  } else {
    fx = f(x);
    ++evals;
  }
  if (!std::isfinite(fx)) throw EvaluationError("forward_fd: non-finite F(x)", x);

  const double scale = static_cast<double>(p.dim()) / static_cast<double>(p.ell());
  out.g = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd probe(x.size());
  for (Eigen::Index i = 0; i < p.ell(); ++i) {
    probe = x + h * p.column(i);
    const double fp = f(probe);
    ++evals;
    if (!std::isfinite(fp)) throw EvaluationError("forward_fd: non-finite probe value", probe);
    out.g += ((fp - fx) / h) * p.column(i);
  }
  out.g *= scale;
  out.evals_used = evals;
  out.base_value = fx;
  return out;
}

}  // namespace zofd
