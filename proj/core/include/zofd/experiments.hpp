#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zofd/experiment_config.hpp"
#include "zofd/linesearch.hpp"
#include "zofd/metrics.hpp"
#include "zofd/objectives.hpp"
#include "zofd/smoothing.hpp"

namespace zofd {

// Batch drivers behind the `zofd` subcommands. Each returns its rows and,
// when cfg.out_dir is non-empty, writes them there. Every CSV starts with
// output_header(cfg). Cells are independent and may run on cfg.jobs
// threads; results are merged in grid order, so output does not depend on
// the job count.

struct TimingRow {
  DirectionKind kind = DirectionKind::gaussian;
  int d = 0;
  int ell = 0;
  TimingStats stats;
};

/// timing.csv: `kind,d,ell,mean_s,std_s,repeats`. Always sequential.
std::vector<TimingRow> cmd_timing(const ExperimentConfig& cfg);

struct GradErrorRow {
  std::string problem;
  DirectionKind kind = DirectionKind::gaussian;
  int ell = 0;
  std::string ell_spec;  // as configured; groups rows across dimensions
  std::size_t trial = 0;
  double rel_error = 0.0;
};

/// grad_error.csv: `problem,kind,ell,trial,rel_error`.
std::vector<GradErrorRow> cmd_grad_error(const ExperimentConfig& cfg,
                                         const ProblemRegistry& registry);

struct OptimizeRow {
  std::string problem;
  DirectionKind kind = DirectionKind::gaussian;
  int ell = 0;
  std::string ell_spec;
  std::size_t repeat = 0;
  std::size_t evals = 0;
  double initial_f = 0.0;
  double best_f = 0.0;
  double v = 0.0;  // value progress of the best iterate; NaN when the run failed
  std::string error;
  RunTrace trace;
};

struct OptimizeResult {
  std::vector<OptimizeRow> rows;
};

/// optimize.csv: `problem,kind,ell,repeat,evals,best_f,V`;
/// convergence.csv: `problem,kind,ell,repeat,evals,f_best`;
/// traces/<problem>__<kind>__<ell>__r<repeat>.csv per run;
/// errors.csv: `problem,kind,ell,repeat,message` when any run failed.
/// V uses the analytic minimum when known, else the smallest value seen by
/// any run on that problem; V = 1 when f_0 equals that minimum.
OptimizeResult cmd_optimize(const ExperimentConfig& cfg, const ProblemRegistry& registry);

struct ProfileCurve {
  DirectionKind kind = DirectionKind::gaussian;
  std::string ell;      // ell spec as configured ("d/2", "10", ...)
  ProfileTable table;
  std::vector<CurvePoint> curve;
  std::vector<std::pair<std::size_t, double>> budget_curve;  // (evals, fraction)
};

/// profile_curve.csv: `kind,ell,tau,fraction_solved`;
/// profile_budget.csv (optimize source): `kind,ell,evals,fraction_solved` at
/// tau = cfg.tau_fixed; profile_tables/<kind>__<ell>.csv in the
/// `problem_id,expected_value,n_samples` layout.
std::vector<ProfileCurve> cmd_profile(const ExperimentConfig& cfg,
                                      const ProblemRegistry& registry);

/// Curves from grad-error rows: expected value = mean rel_error over trials,
/// grouped by (kind, ell_spec), or by (kind, ell) when ell_spec is empty.
std::vector<ProfileCurve> profile_from_grad_errors(const std::vector<GradErrorRow>& rows,
                                                   const std::vector<double>& taus);

struct OracleResult {
  std::vector<SmoothingReport> reports;
  std::vector<UnbiasednessResult> unbiasedness;
  bool passed = false;
  nlohmann::json json;
};

/// Runs mse_compare (and unbiasedness_check when enabled) over the oracle
/// grid; writes oracle.json. `passed` is false when any inequality or gap
/// identity check fails at 3 standard errors, when an ell = 1 cell has a
/// non-zero predicted gap, or when an unbiasedness check exceeds the
/// Sidak bound taken over every coordinate tested in the grid.
OracleResult cmd_oracle(const ExperimentConfig& cfg,
                        const SurrogateFn& surrogate = default_surrogate());

}  // namespace zofd
