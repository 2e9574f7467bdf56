#include "zofd/metrics.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "zofd/errors.hpp"

namespace zofd {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double rel_grad_error(const Eigen::VectorXd& g, const Eigen::VectorXd& grad) {
  if (g.size() != grad.size()) throw DimensionError("rel_grad_error: size mismatch");
  const double denom = grad.norm();
  if (!(denom > 0.0)) throw DomainError("rel_grad_error: true gradient is zero");
  return (g - grad).norm() / denom;
}

double value_progress(double f_k, double f_0, double f_min) {
  if (!(f_0 > f_min)) throw DomainError("value_progress: need f_0 > f_min");
  return (f_k - f_min) / (f_0 - f_min);
}

double fraction_solved(const ProfileTable& table, double tau) {
  if (table.rows.empty()) throw DomainError("fraction_solved: empty profile table");
  std::size_t solved = 0;
  for (const auto& row : table.rows) {
    if (row.expected_value <= tau) ++solved;
  }
  return static_cast<double>(solved) / static_cast<double>(table.rows.size());
}

std::vector<CurvePoint> fraction_solved_curve(const ProfileTable& table,
                                              const std::vector<double>& taus) {
  std::vector<CurvePoint> curve;
  curve.reserve(taus.size());
  for (double tau : taus) curve.push_back({tau, fraction_solved(table, tau)});
  return curve;
}

std::vector<double> log_tau_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) {
    throw ParameterError("log_tau_grid: need 0 < lo <= hi and points >= 1");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    grid.push_back(lo);
    return grid;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    grid.push_back(i + 1 == points ? hi : std::pow(10.0, a + (b - a) * i / (points - 1)));
  }
  grid.front() = lo;
  return grid;
}

void write_profile_csv(std::ostream& out, const ProfileTable& table) {
  out << "problem_id,expected_value,n_samples\n";
  for (const auto& row : table.rows) {
    out << row.problem_id << ',' << format_number(row.expected_value) << ',' << table.n_samples
        << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "tau,fraction_solved\n";
  for (const auto& p : curve) out << format_number(p.tau) << ',' << format_number(p.fraction) << '\n';
}

TimingStats time_generation(DirectionKind kind, int d, int ell, RngStream& rng,
                            const TimingOptions& options) {
  if (options.repeats < 2) throw ParameterError("time_generation: repeats must be at least 2");
  DirectionSampler sampler(kind, d, ell, options.cache_identity);
  // volatile so the generated matrices are not optimised away
  volatile double sink = 0.0;
  for (std::size_t i = 0; i < options.warmup; ++i) sink = sink + sampler.sample(rng).matrix()(0, 0);

  std::vector<double> seconds;
  seconds.reserve(options.repeats);
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < options.repeats; ++i) {
    const auto start = clock::now();
    const DirectionMatrix& p = sampler.sample(rng);
    const auto stop = clock::now();
    sink = sink + p.matrix()(0, 0);
    seconds.push_back(std::chrono::duration<double>(stop - start).count());
  }

  double mean = 0.0;
  for (double s : seconds) mean += s;
  mean /= static_cast<double>(seconds.size());
  double var = 0.0;
  for (double s : seconds) var += (s - mean) * (s - mean);
  var /= static_cast<double>(seconds.size() - 1);
  return {mean, std::sqrt(var), options.repeats};
}

}  // namespace zofd
