#include "zofd/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zofd/errors.hpp"
#include "zofd/estimator.hpp"

namespace zofd {

namespace {

// Welford accumulator for a scalar.
class RunningScalar {
 public:
  void add(double v) {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }
  double mean() const { return mean_; }
  double std_error() const {
    if (n_ < 2) return 0.0;
    return std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_));
  }
  std::size_t count() const { return n_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Welford accumulator for a vector, with full covariance.
class RunningVector {
 public:
  explicit RunningVector(Eigen::Index d)
      : mean_(Eigen::VectorXd::Zero(d)), m2_(Eigen::MatrixXd::Zero(d, d)) {}

  void add(const Eigen::VectorXd& v) {
    ++n_;
    const Eigen::VectorXd delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_.noalias() += delta * (v - mean_).transpose();
  }

  McVector result() const {
    McVector out;
    out.n = n_;
    out.mean = mean_;
    out.sample_covariance =
        n_ > 1 ? Eigen::MatrixXd(m2_ / static_cast<double>(n_ - 1))
               : Eigen::MatrixXd::Zero(mean_.size(), mean_.size());
    out.std_error = (out.sample_covariance.diagonal() / static_cast<double>(std::max<std::size_t>(n_, 1)))
                        .cwiseSqrt();
    return out;
  }

 private:
  std::size_t n_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
};

void check_args(const Eigen::VectorXd& x, double h, std::size_t n) {
  if (x.size() < 1) throw DimensionError("smoothing: empty point");
  if (!(h > 0.0)) throw ParameterError("smoothing: h must be positive");
  if (n < 1) throw ParameterError("smoothing: need at least one sample");
}

Eigen::VectorXd unit_vector(int d, RngStream& rng) {
  Eigen::VectorXd v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

// Independent child stream drawn from the parent.
RngStream split(RngStream& rng) {
  const std::uint64_t seed = rng();
  const std::uint64_t stream = rng();
  return RngStream(seed, stream);
}

}  // namespace

double family_z_threshold(int m) {
  if (m < 1) throw ParameterError("family_z_threshold: m must be positive");
  if (m == 1) return 3.0;
  const double alpha = std::erfc(3.0 / std::sqrt(2.0));
  const double per_test = -std::expm1(std::log1p(-alpha) / m);
  // Invert erfc(z / sqrt 2) = per_test by bisection; erfc is monotone.
  double lo = 3.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > per_test) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd sample_unit_ball(int d, RngStream& rng) {
  if (d < 1) throw DimensionError("sample_unit_ball: dimension must be positive");
  Eigen::VectorXd u = unit_vector(d, rng);
  const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  return radius * u;
}

McScalar smoothed_value_mc(const ScalarFunction& f, const Eigen::VectorXd& x, double h,
                           std::size_t n_samples, RngStream& rng) {
  check_args(x, h, n_samples);
  const int d = static_cast<int>(x.size());
  RunningScalar acc;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const Eigen::VectorXd point = x + h * sample_unit_ball(d, rng);
    const double v = f(point);
    if (!std::isfinite(v)) throw EvaluationError("smoothed_value_mc: non-finite sample", point);
    acc.add(v);
  }
  return {acc.mean(), acc.std_error(), acc.count()};
}

McVector smoothed_grad_mc(const ScalarFunction& f, const Eigen::VectorXd& x, double h,
                          std::size_t n_samples, RngStream& rng) {
  check_args(x, h, n_samples);
  const int d = static_cast<int>(x.size());
  const double fx = f(x);
  if (!std::isfinite(fx)) throw EvaluationError("smoothed_grad_mc: non-finite F(x)", x);
  RunningVector acc(d);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const Eigen::VectorXd p = unit_vector(d, rng);
    const Eigen::VectorXd point = x + h * p;
    const double v = f(point);
    if (!std::isfinite(v)) throw EvaluationError("smoothed_grad_mc: non-finite sample", point);
    acc.add((static_cast<double>(d) / h) * (v - fx) * p);
  }
  return acc.result();
}

SurrogateFn default_surrogate() {
  return [](const ScalarFunction& f, const Eigen::VectorXd& x, double h, const DirectionMatrix& p,
            double fx) { return forward_fd(f, x, h, p, fx).g; };
}

UnbiasednessResult unbiasedness_check(DirectionKind kind, const ScalarFunction& f,
                                      const Eigen::VectorXd& x, double h, int ell,
                                      std::size_t n_samples, RngStream& rng,
                                      const SurrogateFn& surrogate) {
  if (kind != DirectionKind::spherical && kind != DirectionKind::qr_haar) {
    throw ParameterError("unbiasedness_check: kind must be spherical or qr_haar");
  }
  check_args(x, h, n_samples);
  const int d = static_cast<int>(x.size());
  RngStream direction_stream = split(rng);
  RngStream reference_stream = split(rng);

  const double fx = f(x);
  if (!std::isfinite(fx)) throw EvaluationError("unbiasedness_check: non-finite F(x)", x);
  RunningVector acc(d);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const DirectionMatrix p = generate(kind, d, ell, direction_stream);
    acc.add(surrogate(f, x, h, p, fx));
  }
  const McVector estimate = acc.result();
  const McVector reference = smoothed_grad_mc(f, x, h, n_samples, reference_stream);

  UnbiasednessResult result;
  result.kind = kind;
  result.ell = ell;
  result.n_samples = n_samples;
  result.z_threshold = family_z_threshold(d);
  for (int i = 0; i < d; ++i) {
    const double dev = std::abs(estimate.mean[i] - reference.mean[i]);
    const double se = std::hypot(estimate.std_error[i], reference.std_error[i]);
    const double z = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : INFINITY);
    if (dev > result.max_deviation) {
      result.max_deviation = dev;
      result.std_error = se;
    }
    result.max_z = std::max(result.max_z, z);
  }
  result.passed = result.max_z <= result.z_threshold;
  return result;
}

SmoothingReport mse_compare(const Objective& f, const Eigen::VectorXd& x, double h, int ell,
                            std::size_t n_samples, RngStream& rng, const SurrogateFn& surrogate) {
  if (!f.has_gradient()) throw ValidationError("mse_compare: '" + f.name + "' has no gradient");
  check_args(x, h, n_samples);
  const int d = static_cast<int>(x.size());
  if (ell < 1 || ell > d) throw DimensionError("mse_compare: need 1 <= ell <= d");

  RngStream structured_stream = split(rng);
  RngStream unstructured_stream = split(rng);
  RngStream smoothing_stream = split(rng);

  const Eigen::VectorXd grad = f.gradient(x);
  const double fx = f.value(x);
  if (!std::isfinite(fx)) throw EvaluationError("mse_compare: non-finite F(x)", x);

  RunningScalar structured;
  RunningScalar unstructured;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const DirectionMatrix p1 = gen_qr_haar(d, ell, structured_stream);
    structured.add((surrogate(f.value, x, h, p1, fx) - grad).squaredNorm());
  }
  for (std::size_t k = 0; k < n_samples; ++k) {
    const DirectionMatrix p2 = gen_spherical(d, ell, unstructured_stream);
    unstructured.add((surrogate(f.value, x, h, p2, fx) - grad).squaredNorm());
  }
  const McVector smooth = smoothed_grad_mc(f.value, x, h, n_samples, smoothing_stream);

  SmoothingReport r;
  r.d = d;
  r.ell = ell;
  r.h = h;
  r.n_samples = n_samples;
  r.mse_structured = structured.mean();
  r.se_structured = structured.std_error();
  r.mse_unstructured = unstructured.mean();
  r.se_unstructured = unstructured.std_error();

  // E||mean||^2 = ||mu||^2 + tr(Sigma) / n, so subtract the trace term.
  const double n = static_cast<double>(smooth.n);
  r.grad_smooth_norm_sq = smooth.mean.squaredNorm() - smooth.sample_covariance.trace() / n;
  r.grad_smooth_norm_sq_se =
      std::sqrt(std::max(0.0, 4.0 * smooth.mean.dot(smooth.sample_covariance * smooth.mean) / n));

  const double factor = static_cast<double>(ell - 1) / static_cast<double>(ell);
  r.predicted_gap = factor * r.grad_smooth_norm_sq;
  r.observed_gap = r.mse_unstructured - r.mse_structured;
  r.mse_se = std::hypot(r.se_structured, r.se_unstructured);
  r.combined_se = std::hypot(r.mse_se, factor * r.grad_smooth_norm_sq_se);
  r.gap_without_probe_scale = static_cast<double>(d) * d / (h * h) * factor * r.grad_smooth_norm_sq;

  r.inequality_holds = r.mse_structured <= r.mse_unstructured + 3.0 * r.mse_se;
  r.gap_identity_holds = std::abs(r.observed_gap - r.predicted_gap) <= 3.0 * r.combined_se;
  const double unscaled_se =
      std::hypot(r.mse_se, static_cast<double>(d) * d / (h * h) * factor * r.grad_smooth_norm_sq_se);
  r.unscaled_gap_consistent =
      std::abs(r.observed_gap - r.gap_without_probe_scale) <= 3.0 * unscaled_se;
  return r;
}

}  // namespace zofd
