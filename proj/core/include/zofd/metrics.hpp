#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zofd/directions.hpp"
#include "zofd/rng.hpp"

namespace zofd {

/// ||g - grad|| / ||grad||. Throws DomainError when grad is zero.
double rel_grad_error(const Eigen::VectorXd& g, const Eigen::VectorXd& grad);

/// (f_k - f_min) / (f_0 - f_min). Throws DomainError when f_0 <= f_min.
double value_progress(double f_k, double f_0, double f_min);

struct ProfileRow {
  std::string problem_id;
  double expected_value = 0.0;
};

/// Per-problem expected metric (mean relative gradient error over direction
/// draws, or mean best-iterate progress over repetitions).
struct ProfileTable {
  std::vector<ProfileRow> rows;
  std::size_t n_samples = 1;
};

/// (1/n) * #{rows with expected_value <= tau}. Throws DomainError on an
/// empty table.
double fraction_solved(const ProfileTable& table, double tau);

struct CurvePoint {
  double tau = 0.0;
  double fraction = 0.0;
};

std::vector<CurvePoint> fraction_solved_curve(const ProfileTable& table,
                                              const std::vector<double>& taus);

/// `points` logarithmically spaced values from `lo` to `hi` inclusive.
std::vector<double> log_tau_grid(double lo = 1e-6, double hi = 1.0, int points = 25);

void write_profile_csv(std::ostream& out, const ProfileTable& table);
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

struct TimingStats {
  double mean_seconds = 0.0;
  double std_seconds = 0.0;  // sample standard deviation
  std::size_t repeats = 0;
};

struct TimingOptions {
  std::size_t repeats = 500;
  std::size_t warmup = 5;
  bool cache_identity = true;
};

/// Wall-clock (steady_clock) statistics of `repeats` consecutive direction
/// matrix generations after `warmup` discarded ones. The sampler and stream
/// are set up before timing starts. Throws ParameterError when repeats < 2.
TimingStats time_generation(DirectionKind kind, int d, int ell, RngStream& rng,
                            const TimingOptions& options = {});

}  // namespace zofd
