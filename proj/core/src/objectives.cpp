#include "zofd/objectives.hpp"

#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "zofd/errors.hpp"

namespace zofd {

namespace {

void require_dim(int d, int min_d, const char* what) {
  if (d < min_d) {
    throw DimensionError(std::string(what) + ": dimension must be at least " +
                         std::to_string(min_d));
  }
}

Eigen::VectorXd gaussian_vector(int d, RngStream& rng) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double ProblemSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Objective make_least_squares(int d, double L, double mu, RngStream& rng) {
  require_dim(d, 1, "least_squares");
  if (!(mu > 0.0) || !(L >= mu)) throw ParameterError("least_squares: need L >= mu > 0");

  Eigen::MatrixXd a_bar(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) a_bar(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a_bar);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd s(d);
  const double lo = std::sqrt(mu);
  const double hi = std::sqrt(L);
  for (int i = 0; i < d; ++i) s[i] = d == 1 ? lo : lo + (hi - lo) * i / (d - 1);

  struct State {
    Eigen::MatrixXd a;
    Eigen::VectorXd y;
  };
  auto state = std::make_shared<State>();
  state->a = q * s.asDiagonal() * q.transpose();
  Eigen::VectorXd x_star = gaussian_vector(d, rng);
  state->y = state->a * x_star;

  Objective obj;
  obj.name = "least_squares";
  obj.dim = d;
  obj.value = [state](const Eigen::VectorXd& x) {
    return 0.5 * (state->a * x - state->y).squaredNorm();
  };
  obj.gradient = [state](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return state->a.transpose() * (state->a * x - state->y);
  };
  obj.f_min = 0.0;
  obj.minimizer = std::move(x_star);
  obj.x0_default = Eigen::VectorXd::Ones(d);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  obj.spec.params = {{"L", L}, {"mu", mu}};
  return obj;
}

Objective make_qing(int d) {
  require_dim(d, 1, "qing");
  Objective obj;
  obj.name = "qing";
  obj.dim = d;
  obj.value = [](const Eigen::VectorXd& x) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double r = x[i] * x[i] - static_cast<double>(i + 1);
      total += r * r;
    }
    return total;
  };
  obj.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      g[i] = 4.0 * x[i] * (x[i] * x[i] - static_cast<double>(i + 1));
    }
    return g;
  };
  obj.f_min = 0.0;
  Eigen::VectorXd x_star(d);
  for (int i = 0; i < d; ++i) x_star[i] = std::sqrt(static_cast<double>(i + 1));
  obj.minimizer = std::move(x_star);
  obj.x0_default = Eigen::VectorXd::Ones(d);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  return obj;
}

Objective make_rosenbrock(int d) {
  require_dim(d, 2, "rosenbrock");
  Objective obj;
  obj.name = "rosenbrock";
  obj.dim = d;
  obj.value = [](const Eigen::VectorXd& x) {
    double total = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = x[i] - 1.0;
      total += 100.0 * a * a + b * b;
    }
    return total;
  };
  obj.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * a + 2.0 * (x[i] - 1.0);
      g[i + 1] += 200.0 * a;
    }
    return g;
  };
  obj.f_min = 0.0;
  obj.minimizer = Eigen::VectorXd::Ones(d);
  obj.x0_default = Eigen::VectorXd::Constant(d, 0.5);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  return obj;
}

Objective make_logistic(int d, int n, double lambda, RngStream& rng) {
  require_dim(d, 1, "logistic");
  if (n < 1) throw ParameterError("logistic: n must be positive");
  if (!(lambda >= 0.0)) throw ParameterError("logistic: lambda must be nonnegative");

  struct State {
    Eigen::MatrixXd z;  // n x d, row i is z_i
    Eigen::VectorXd y;
    double lambda;
  };
  auto state = std::make_shared<State>();
  // Draw order: x*, then z_1, ..., z_n.
  const Eigen::VectorXd x_star = gaussian_vector(d, rng);
  state->z.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) state->z(i, j) = rng.normal();
  }
  state->y.resize(n);
  for (int i = 0; i < n; ++i) state->y[i] = state->z.row(i).dot(x_star) >= 0.0 ? 1.0 : -1.0;
  state->lambda = lambda;

  Objective obj;
  obj.name = "logistic";
  obj.dim = d;
  obj.value = [state](const Eigen::VectorXd& x) {
    const Eigen::VectorXd margins = state->y.cwiseProduct(state->z * x);
    double total = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) total += softplus(-margins[i]);
    return total / static_cast<double>(margins.size()) + state->lambda * x.squaredNorm();
  };
  obj.gradient = [state](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd margins = state->y.cwiseProduct(state->z * x);
    Eigen::VectorXd weights(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      weights[i] = -state->y[i] * sigmoid(-margins[i]);
    }
    return state->z.transpose() * weights / static_cast<double>(margins.size()) +
           2.0 * state->lambda * x;
  };
  obj.x0_default = Eigen::VectorXd::Zero(d);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  obj.spec.params = {{"n", static_cast<double>(n)}, {"lambda", lambda}};
  return obj;
}

Objective make_trid(int d) {
  require_dim(d, 1, "trid");
  Objective obj;
  obj.name = "trid";
  obj.dim = d;
  obj.value = [](const Eigen::VectorXd& x) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      total += (x[i] - 1.0) * (x[i] - 1.0);
      if (i > 0) total -= x[i] * x[i - 1];
    }
    return total;
  };
  obj.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::Index n = x.size();
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g[i] = 2.0 * (x[i] - 1.0);
      if (i > 0) g[i] -= x[i - 1];
      if (i + 1 < n) g[i] -= x[i + 1];
    }
    return g;
  };
  Eigen::VectorXd x_star(d);
  for (int i = 1; i <= d; ++i) x_star[i - 1] = static_cast<double>(i) * (d + 1 - i);
  obj.minimizer = std::move(x_star);
  obj.f_min = -static_cast<double>(d) * (d + 4) * (d - 1) / 6.0;
  obj.x0_default = Eigen::VectorXd::Zero(d);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  return obj;
}

Objective make_griewank(int d) {
  require_dim(d, 1, "griewank");
  Objective obj;
  obj.name = "griewank";
  obj.dim = d;
  obj.value = [](const Eigen::VectorXd& x) {
    double sum = 0.0;
    double prod = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      sum += x[i] * x[i] / 4000.0;
      prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + sum - prod;
  };
  obj.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::Index n = x.size();
    Eigen::VectorXd cosines(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      cosines[i] = std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    // prod_{j != i} cos(.) from prefix and suffix products
    Eigen::VectorXd prefix(n + 1);
    Eigen::VectorXd suffix(n + 1);
    prefix[0] = 1.0;
    suffix[n] = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * cosines[i];
    for (Eigen::Index i = n; i > 0; --i) suffix[i - 1] = suffix[i] * cosines[i - 1];
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double root = std::sqrt(static_cast<double>(i + 1));
      g[i] = x[i] / 2000.0 + prefix[i] * suffix[i + 1] * std::sin(x[i] / root) / root;
    }
    return g;
  };
  obj.f_min = 0.0;
  obj.minimizer = Eigen::VectorXd::Zero(d);
  obj.x0_default = Eigen::VectorXd::Ones(d);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  return obj;
}

Objective make_linear(const Eigen::VectorXd& a) {
  require_dim(static_cast<int>(a.size()), 1, "linear");
  auto coeffs = std::make_shared<const Eigen::VectorXd>(a);
  Objective obj;
  obj.name = "linear";
  obj.dim = static_cast<int>(a.size());
  obj.value = [coeffs](const Eigen::VectorXd& x) { return coeffs->dot(x); };
  obj.gradient = [coeffs](const Eigen::VectorXd&) -> Eigen::VectorXd { return *coeffs; };
  obj.x0_default = Eigen::VectorXd::Ones(a.size());
  obj.spec.name = obj.name;
  obj.spec.dim = obj.dim;
  return obj;
}

Objective make_sphere_quadratic(int d) {
  require_dim(d, 1, "quadratic");
  Objective obj;
  obj.name = "quadratic";
  obj.dim = d;
  obj.value = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  obj.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  obj.f_min = 0.0;
  obj.minimizer = Eigen::VectorXd::Zero(d);
  obj.x0_default = Eigen::VectorXd::Ones(d);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  return obj;
}

Objective make_constant(int d, double c) {
  require_dim(d, 1, "constant");
  Objective obj;
  obj.name = "constant";
  obj.dim = d;
  obj.value = [c](const Eigen::VectorXd&) { return c; };
  obj.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(x.size());
  };
  obj.f_min = c;
  obj.minimizer = Eigen::VectorXd::Zero(d);
  obj.x0_default = Eigen::VectorXd::Ones(d);
  obj.spec.name = obj.name;
  obj.spec.dim = d;
  obj.spec.params = {{"value", c}};
  return obj;
}

Eigen::VectorXd central_difference_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                                            double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

void validate_objective(const Objective& objective, const ValidationOptions& options) {
  const auto& name = objective.name;
  if (!objective.value) throw ValidationError(name + ": missing value function");
  if (objective.dim < 1 || objective.x0_default.size() != objective.dim) {
    throw ValidationError(name + ": x0_default does not match the dimension");
  }

  if (objective.has_gradient()) {
    RngStream rng(options.seed, fnv1a64(name));
    for (int k = 0; k < options.gradient_points; ++k) {
      Eigen::VectorXd x = objective.x0_default;
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += rng.normal();
      const Eigen::VectorXd analytic = objective.gradient(x);
      if (analytic.size() != x.size()) {
        throw ValidationError(name + ": gradient has the wrong dimension");
      }
      const Eigen::VectorXd numeric =
          central_difference_gradient(objective.value, x, options.gradient_step);
      const double err = (analytic - numeric).norm() / std::max(1.0, analytic.norm());
      if (!(err <= options.gradient_tolerance)) {
        throw ValidationError(name + ": analytic gradient disagrees with central differences "
                                     "(relative error " + std::to_string(err) + ")");
      }
    }
  }

  if (objective.f_min && objective.minimizer) {
    const double at_min = objective.value(*objective.minimizer);
    const double f_min = *objective.f_min;
    if (!(std::abs(at_min - f_min) <= options.minimum_tolerance * std::max(1.0, std::abs(f_min)))) {
      throw ValidationError(name + ": value at the minimiser does not match f_min");
    }
  }
}

}  // namespace zofd
