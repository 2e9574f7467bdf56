#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "zofd/objective.hpp"
#include "zofd/rng.hpp"

namespace zofd {

// Benchmark objectives. Random instances take an explicit stream so that a
// (spec.seed, name) pair always rebuilds the same problem.

/// F(x) = 1/2 ||A x - y||^2 with A = Q S Q^T, Q from the QR factorisation of a
/// Gaussian matrix, S = diag(linspace(sqrt(mu), sqrt(L), d)), y = A x*,
/// x* ~ N(0, I). Eigenvalues of A^T A lie in [mu, L]. x0 = ones.
Objective make_least_squares(int d, double L, double mu, RngStream& rng);

/// Qing: sum_i (x_i^2 - i)^2 (1-based i); minimum 0 at x_i = +-sqrt(i). x0 = ones.
Objective make_qing(int d);

/// Rosenbrock: sum_{i<d} 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2, d >= 2.
/// Minimum 0 at ones. x0 = 0.5 * ones.
Objective make_rosenbrock(int d);

/// Regularised logistic loss
///   (1/n) sum_i log(1 + exp(-y_i <x, z_i>)) + lambda ||x||^2
/// with z_i, x* ~ N(0, I) and y_i = sign(<x*, z_i>), sign(0) = +1.
/// No analytic minimum. x0 = zeros.
Objective make_logistic(int d, int n, double lambda, RngStream& rng);

/// Trid: sum_i (x_i - 1)^2 - sum_{i>=2} x_i x_{i-1}. Minimiser
/// x_i = i (d + 1 - i), minimum -d (d + 4) (d - 1) / 6. x0 = zeros.
Objective make_trid(int d);

/// Griewank: 1 + sum_i x_i^2 / 4000 - prod_i cos(x_i / sqrt(i)). Minimum 0 at 0.
/// x0 = ones.
Objective make_griewank(int d);

/// F(x) = <a, x>.
Objective make_linear(const Eigen::VectorXd& a);

/// F(x) = 1/2 ||x||^2. x0 = ones.
Objective make_sphere_quadratic(int d);

/// F(x) = c.
Objective make_constant(int d, double c);

/// Central-difference gradient with the given step.
Eigen::VectorXd central_difference_gradient(const ScalarFunction& f, const Eigen::VectorXd& x,
                                            double step);

struct ValidationOptions {
  int gradient_points = 5;
  double gradient_step = 1e-6;
  double gradient_tolerance = 1e-5;
  double minimum_tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
};

/// Throws ValidationError when the analytic gradient disagrees with central
/// differences (relative to max(1, ||grad||)) at random points around x0,
/// or when f_min does not match the value at the known minimiser.
void validate_objective(const Objective& objective, const ValidationOptions& options = {});

/// Name-addressable collection of problem constructors and externally
/// registered instances (the attachment point for suites such as CUTEst).
class ProblemRegistry {
 public:
  using Factory = std::function<Objective(const ProblemSpec&)>;

  struct Entry {
    std::string name;
    std::string description;
    bool external = false;
  };

  /// Registry pre-populated with every built-in problem.
  static ProblemRegistry with_builtins();

  void register_builtin(std::string name, std::string description, Factory factory);

  /// Validates and stores a ready-made instance. Throws RegistryError on a
  /// duplicate name and ValidationError when the checks fail.
  void register_external(Objective problem, const ValidationOptions& options = {});

  bool contains(const std::string& name) const;
  std::vector<Entry> list() const;

  /// Builds a problem. For external problems the stored instance is
  /// returned and spec.dim must be 0 or match.
  Objective make(const ProblemSpec& spec) const;
  Objective get(const std::string& name) const;

 private:
  struct Builtin {
    std::string description;
    Factory factory;
  };
  std::map<std::string, Builtin> builtins_;
  std::map<std::string, Objective> external_;
};

}  // namespace zofd
