#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>

#include "zofd/directions.hpp"
#include "zofd/objective.hpp"
#include "zofd/rng.hpp"

namespace zofd {

// Monte-Carlo checks for the ball-smoothed surrogate
//   F_h(x) = E_{u ~ U(B^d)} F(x + h u)
// and the estimators that are unbiased for its gradient.

struct McScalar {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct McVector {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;
  Eigen::MatrixXd sample_covariance;  // per-sample covariance (not of the mean)
  std::size_t n = 0;
};

/// Uniform point of the unit ball: sphere direction scaled by U^(1/d).
Eigen::VectorXd sample_unit_ball(int d, RngStream& rng);

/// Mean of F(x + h u) over u ~ U(B^d). Throws EvaluationError on a
/// non-finite sample.
McScalar smoothed_value_mc(const ScalarFunction& f, const Eigen::VectorXd& x, double h,
                           std::size_t n_samples, RngStream& rng);

/// Mean of (d / h) (F(x + h p) - F(x)) p over p ~ U(S^{d-1}); unbiased for
/// grad F_h(x).
McVector smoothed_grad_mc(const ScalarFunction& f, const Eigen::VectorXd& x, double h,
                          std::size_t n_samples, RngStream& rng);

/// Gradient surrogate used by the oracle; defaults to forward_fd. Tests swap
/// in deliberately broken estimators to check the oracle notices.
using SurrogateFn = std::function<Eigen::VectorXd(
    const ScalarFunction& f, const Eigen::VectorXd& x, double h, const DirectionMatrix& p,
    double fx)>;

SurrogateFn default_surrogate();

struct UnbiasednessResult {
  DirectionKind kind = DirectionKind::spherical;
  int ell = 1;
  std::size_t n_samples = 0;
  double max_deviation = 0.0;  // max_i |mean g_i - reference_i|
  double std_error = 0.0;      // combined standard error at that coordinate
  double max_z = 0.0;          // max_i |deviation_i| / se_i
  // Per-coordinate z bound. Sidak-adjusted so that the max over d
  // coordinates has the two-sided level of a single 3-sigma test.
  double z_threshold = 3.0;
  bool passed = false;         // max_z <= z_threshold
};

/// Sidak-adjusted z bound for the max of `m` independent two-sided tests at
/// the family level of one 3-sigma test. Equals 3 for m = 1.
double family_z_threshold(int m);

/// Compares the Monte-Carlo mean of g(x, h, P) over P draws of `kind`
/// (spherical or qr_haar) with smoothed_grad_mc on an independent stream.
UnbiasednessResult unbiasedness_check(DirectionKind kind, const ScalarFunction& f,
                                      const Eigen::VectorXd& x, double h, int ell,
                                      std::size_t n_samples, RngStream& rng,
                                      const SurrogateFn& surrogate = default_surrogate());

/// Mean squared errors of the surrogate with Haar-orthogonal columns
/// (structured) and with i.i.d. spherical columns (unstructured).
///
/// Writing delta(p) = F(x + h p) - F(x), independent spherical columns give
/// E[delta(p_i) delta(p_j) <p_i, p_j>] = (h/d)^2 ||grad F_h||^2 for i != j,
/// while orthogonal columns make that cross term vanish. Hence
///   mse_unstructured - mse_structured = (ell - 1) / ell * ||grad F_h(x)||^2.
struct SmoothingReport {
  int d = 0;
  int ell = 0;
  double h = 0.0;
  std::size_t n_samples = 0;

  double mse_structured = 0.0;
  double se_structured = 0.0;
  double mse_unstructured = 0.0;
  double se_unstructured = 0.0;

  double grad_smooth_norm_sq = 0.0;  // unbiased MC estimate of ||grad F_h(x)||^2
  double grad_smooth_norm_sq_se = 0.0;

  double predicted_gap = 0.0;  // (ell - 1) / ell * ||grad F_h||^2
  double observed_gap = 0.0;   // mse_unstructured - mse_structured
  double mse_se = 0.0;         // sqrt(se_s^2 + se_u^2), used by the inequality
  double combined_se = 0.0;    // also folds in the SE of predicted_gap

  // d^2 (ell - 1) / (ell h^2) * ||grad F_h||^2: the gap expression with the
  // (h/d)^2 factor of the cross term dropped. Reported for comparison only.
  double gap_without_probe_scale = 0.0;

  bool inequality_holds = false;       // mse_s <= mse_u + 3 * mse_se
  bool gap_identity_holds = false;     // |observed - predicted| <= 3 * combined SE
  bool unscaled_gap_consistent = false;  // same test for gap_without_probe_scale
};

/// Requires an analytic gradient (ValidationError otherwise). The three
/// Monte-Carlo estimates use independent substreams of `rng`.
SmoothingReport mse_compare(const Objective& f, const Eigen::VectorXd& x, double h, int ell,
                            std::size_t n_samples, RngStream& rng,
                            const SurrogateFn& surrogate = default_surrogate());

}  // namespace zofd
