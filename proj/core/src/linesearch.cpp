#include "zofd/linesearch.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "zofd/errors.hpp"
#include "zofd/estimator.hpp"

namespace zofd {

namespace {

struct BudgetExhausted {};

// Counts every evaluation and refuses the one that would exceed the budget.
class BudgetedFunction {
 public:
  BudgetedFunction(const ScalarFunction& f, std::size_t budget) : f_(f), budget_(budget) {}

  double operator()(const Eigen::VectorXd& x) {
    if (used_ >= budget_) throw BudgetExhausted{};
    ++used_;
    return f_(x);
  }

  std::size_t used() const noexcept { return used_; }

 private:
  const ScalarFunction& f_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FdConfig preset(std::string_view name) {
  FdConfig cfg;
  if (name == "synthetic") {
    cfg.gamma0 = 1.0;
    cfg.c = 1e-7;
    cfg.gamma_min = 1e-10;
    cfg.gamma_max = 1000.0;
    cfg.theta = 0.5;
    cfg.rho_exp = 2.0;
  } else if (name == "cutest") {
    cfg.gamma0 = 0.5;
    cfg.c = 1e-5;
    cfg.gamma_min = 1e-10;
    cfg.gamma_max = 1.0;
    cfg.theta = 0.5;
    cfg.rho_exp = 2.0;
  } else if (name == "adversarial") {
    cfg.gamma0 = 1.0;
    cfg.c = 1e-7;
    cfg.gamma_min = 1e-10;
    cfg.gamma_max = 1000.0;
    cfg.theta = 0.9;
    cfg.rho_exp = 1.0 / 0.9;
  } else {
    throw ParameterError("unknown preset '" + std::string(name) +
                         "' (expected synthetic, cutest or adversarial)");
  }
  cfg.h = 1e-7;
  cfg.budget = 10000;
  return cfg;
}

void validate(const FdConfig& cfg) {
  auto fail = [](const std::string& what) { throw ParameterError("FdConfig: " + what); };
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) fail("h must be positive and finite");
  if (!(cfg.gamma_min > 0.0)) fail("gamma_min must be positive");
  if (!(cfg.gamma_min <= cfg.gamma0 && cfg.gamma0 <= cfg.gamma_max) ||
      !std::isfinite(cfg.gamma_max)) {
    fail("need gamma_min <= gamma0 <= gamma_max");
  }
  if (!(cfg.c >= 0.0) || !std::isfinite(cfg.c)) fail("c must be nonnegative");
  if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) fail("theta must lie in (0, 1)");
  if (!(cfg.rho_exp >= 1.0) || !std::isfinite(cfg.rho_exp)) fail("rho_exp must be >= 1");
  if (cfg.ell < 1) fail("ell must be positive");
  if (cfg.budget < static_cast<std::size_t>(cfg.ell) + 2) {
    fail("budget " + std::to_string(cfg.budget) + " is below ell + 2 = " +
         std::to_string(cfg.ell + 2));
  }
}

RunTrace run(const Objective& f, const Eigen::VectorXd& x0, const FdConfig& cfg, RngStream& rng) {
  return run(f.value, x0, cfg, rng);
}

RunTrace run(const ScalarFunction& f, const Eigen::VectorXd& x0, const FdConfig& cfg,
             RngStream& rng) {
  validate(cfg);
  if (!x0.allFinite()) throw ParameterError("run: x0 must be finite");
  const int d = static_cast<int>(x0.size());
  DirectionSampler sampler(cfg.kind, d, cfg.ell, cfg.cache_identity);

  BudgetedFunction budgeted(f, cfg.budget);
  const ScalarFunction counted = [&budgeted](const Eigen::VectorXd& y) { return budgeted(y); };

  RunTrace trace;
  Eigen::VectorXd x = x0;
  double fx = budgeted(x);
  if (!std::isfinite(fx)) throw EvaluationError("run: non-finite F(x0)", x0);
  trace.initial_f = fx;
  trace.best_f = fx;
  trace.best_x = x;
  double gamma = cfg.gamma0;
  trace.records.push_back({budgeted.used(), fx, fx, gamma, false});

  auto evaluate_trial = [&](const Eigen::VectorXd& y) {
    const double v = budgeted(y);
    if (!std::isfinite(v) && cfg.strict_eval) {
      throw EvaluationError("run: non-finite trial value", y);
    }
    return v;
  };

  try {
    for (;;) {
      const DirectionMatrix& p = sampler.sample(rng);
      const GradEstimate estimate = forward_fd(counted, x, cfg.h, p, fx);
      const Eigen::VectorXd& g = estimate.g;
      const double g_norm_sq = g.squaredNorm();
      auto sufficient = [&](double value, double step) {
        return std::isfinite(value) && value <= fx - cfg.c * step * g_norm_sq;
      };

      Eigen::VectorXd trial = x - gamma * g;
      double f_trial = evaluate_trial(trial);
      while (!sufficient(f_trial, gamma) && gamma > cfg.gamma_min) {
        gamma = std::max(gamma * cfg.theta, cfg.gamma_min);
        trial = x - gamma * g;
        f_trial = evaluate_trial(trial);
      }

      ++trace.iterations;
      const bool accepted = sufficient(f_trial, gamma);
      const double bound = fx - cfg.c * gamma * g_norm_sq;
      if (accepted) {
        x = std::move(trial);
        fx = f_trial;
        gamma = std::min(gamma * cfg.rho_exp, cfg.gamma_max);
        ++trace.accepted_steps;
        if (fx < trace.best_f) {
          trace.best_f = fx;
          trace.best_x = x;
        }
      }
      trace.records.push_back({budgeted.used(), trace.best_f, fx, gamma, accepted, bound});
    }
  } catch (const BudgetExhausted&) {
    if (trace.records.back().evals != budgeted.used()) {
      trace.records.push_back({budgeted.used(), trace.best_f, fx, gamma, false});
    }
  }

  trace.final_x = x;
  trace.evals = budgeted.used();
  return trace;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "evals,f_best,f_current,gamma,accepted\n";
  for (const auto& r : trace.records) {
    out << r.evals << ',' << format_number(r.f_best) << ',' << format_number(r.f_current) << ','
        << format_number(r.gamma) << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

}  // namespace zofd
