#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "zofd/directions.hpp"
#include "zofd/objective.hpp"
#include "zofd/rng.hpp"

namespace zofd {

/// Hyperparameters of the finite-difference line-search method.
struct FdConfig {
  double h = 1e-7;          // forward-difference step, constant across iterations
  double gamma0 = 1.0;      // initial step size
  double gamma_min = 1e-10;
  double gamma_max = 1000.0;
  double c = 1e-7;          // Armijo constant
  double theta = 0.5;       // contraction, in (0, 1)
  double rho_exp = 2.0;     // expansion, >= 1
  std::size_t budget = 10000;  // total objective evaluations
  int ell = 1;
  DirectionKind kind = DirectionKind::qr_haar;
  // Non-finite trial values normally just fail the sufficient-decrease
  // test; with strict_eval they raise EvaluationError instead.
  bool strict_eval = false;
  bool cache_identity = true;
};

/// Named presets: "synthetic", "cutest", "adversarial".
FdConfig preset(std::string_view name);

/// Throws ParameterError when a field is out of range, or when
/// budget < ell + 2.
void validate(const FdConfig& cfg);

struct TraceRecord {
  std::size_t evals = 0;  // evaluations consumed when the record was taken
  double f_best = 0.0;
  double f_current = 0.0;
  double gamma = 0.0;
  bool accepted = false;
  // F(x_k) - c gamma ||g_k||^2 at the last trial of the iteration, as
  // computed; NaN for records that close no sufficient-decrease test.
  double armijo_bound = std::numeric_limits<double>::quiet_NaN();
};

/// One record for the starting point (evals = 1, accepted = false), one per
/// completed outer iteration, and a final record if the budget ran out in
/// the middle of an iteration.
struct RunTrace {
  std::vector<TraceRecord> records;
  Eigen::VectorXd final_x;
  Eigen::VectorXd best_x;
  double best_f = 0.0;
  double initial_f = 0.0;
  std::size_t evals = 0;
  std::size_t iterations = 0;
  std::size_t accepted_steps = 0;
};

/// Runs the line-search method from x0 until the next objective evaluation
/// would exceed cfg.budget. Each outer iteration draws a fresh direction
/// matrix, forms g_k with forward_fd (reusing F(x_k)), then backtracks
///   while F(x_k - gamma g_k) > F(x_k) - c gamma ||g_k||^2 and gamma > gamma_min:
///     gamma <- max(gamma theta, gamma_min)
/// and accepts x_{k+1} = x_k - gamma g_k with gamma <- min(gamma rho, gamma_max)
/// if the condition holds; otherwise x_k is kept. gamma carries over between
/// iterations. Every call to F counts against the budget.
RunTrace run(const Objective& f, const Eigen::VectorXd& x0, const FdConfig& cfg, RngStream& rng);
RunTrace run(const ScalarFunction& f, const Eigen::VectorXd& x0, const FdConfig& cfg,
             RngStream& rng);

/// CSV with header `evals,f_best,f_current,gamma,accepted`.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

}  // namespace zofd
