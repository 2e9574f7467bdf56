#include <string>

#include "zofd/errors.hpp"
#include "zofd/objectives.hpp"

namespace zofd {

namespace {

RngStream problem_stream(const ProblemSpec& spec) {
  return RngStream(spec.seed, fnv1a64(spec.name));
}

Objective finish(Objective obj, const ProblemSpec& spec) {
  obj.spec.seed = spec.seed;
  for (const auto& [key, value] : spec.params) obj.spec.params.emplace(key, value);
  return obj;
}

}  // namespace

ProblemRegistry ProblemRegistry::with_builtins() {
  ProblemRegistry registry;
  registry.register_builtin(
      "least_squares", "1/2 ||Ax - y||^2, spectrum of A^T A in [mu, L] (params: L=1e4, mu=1)",
      [](const ProblemSpec& spec) {
        RngStream rng = problem_stream(spec);
        return finish(make_least_squares(spec.dim, spec.param("L", 1e4), spec.param("mu", 1.0), rng),
                      spec);
      });
  registry.register_builtin("qing", "sum_i (x_i^2 - i)^2", [](const ProblemSpec& spec) {
    return finish(make_qing(spec.dim), spec);
  });
  registry.register_builtin("rosenbrock", "sum_i 100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2",
                            [](const ProblemSpec& spec) {
                              return finish(make_rosenbrock(spec.dim), spec);
                            });
  registry.register_builtin(
      "logistic", "regularised logistic loss on Gaussian data (params: n=1000, lambda=1e-5)",
      [](const ProblemSpec& spec) {
        RngStream rng = problem_stream(spec);
        const double n = spec.param("n", 1000.0);
        return finish(make_logistic(spec.dim, static_cast<int>(n), spec.param("lambda", 1e-5), rng),
                      spec);
      });
  registry.register_builtin("trid", "sum_i (x_i - 1)^2 - sum_i x_i x_{i-1}",
                            [](const ProblemSpec& spec) { return finish(make_trid(spec.dim), spec); });
  registry.register_builtin("griewank", "1 + sum_i x_i^2 / 4000 - prod_i cos(x_i / sqrt(i))",
                            [](const ProblemSpec& spec) {
                              return finish(make_griewank(spec.dim), spec);
                            });
  registry.register_builtin("linear", "<a, x> with a ~ N(0, I)", [](const ProblemSpec& spec) {
    if (spec.dim < 1) throw DimensionError("linear: dimension must be positive");
    RngStream rng = problem_stream(spec);
    Eigen::VectorXd a(spec.dim);
    for (int i = 0; i < spec.dim; ++i) a[i] = rng.normal();
    return finish(make_linear(a), spec);
  });
  registry.register_builtin("quadratic", "1/2 ||x||^2", [](const ProblemSpec& spec) {
    return finish(make_sphere_quadratic(spec.dim), spec);
  });
  registry.register_builtin("constant", "constant value (params: value=0)",
                            [](const ProblemSpec& spec) {
                              return finish(make_constant(spec.dim, spec.param("value", 0.0)), spec);
                            });
  return registry;
}

void ProblemRegistry::register_builtin(std::string name, std::string description,
                                       Factory factory) {
  if (contains(name)) throw RegistryError("problem '" + name + "' is already registered");
  builtins_.emplace(std::move(name), Builtin{std::move(description), std::move(factory)});
}

void ProblemRegistry::register_external(Objective problem, const ValidationOptions& options) {
  if (problem.name.empty()) throw RegistryError("external problem needs a name");
  if (contains(problem.name)) {
    throw RegistryError("problem '" + problem.name + "' is already registered");
  }
  validate_objective(problem, options);
  if (problem.spec.name.empty()) problem.spec.name = problem.name;
  if (problem.spec.dim == 0) problem.spec.dim = problem.dim;
  const std::string name = problem.name;
  external_.emplace(name, std::move(problem));
}

bool ProblemRegistry::contains(const std::string& name) const {
  return builtins_.count(name) != 0 || external_.count(name) != 0;
}

std::vector<ProblemRegistry::Entry> ProblemRegistry::list() const {
  std::vector<Entry> entries;
  for (const auto& [name, builtin] : builtins_) entries.push_back({name, builtin.description, false});
  for (const auto& [name, obj] : external_) {
    entries.push_back({name, "external, d=" + std::to_string(obj.dim), true});
  }
  return entries;
}

Objective ProblemRegistry::make(const ProblemSpec& spec) const {
  if (const auto it = external_.find(spec.name); it != external_.end()) {
    if (spec.dim != 0 && spec.dim != it->second.dim) {
      throw DimensionError("external problem '" + spec.name + "' has dimension " +
                           std::to_string(it->second.dim));
    }
    return it->second;
  }
  if (const auto it = builtins_.find(spec.name); it != builtins_.end()) {
    return it->second.factory(spec);
  }
  throw RegistryError("unknown problem '" + spec.name + "'");
}

Objective ProblemRegistry::get(const std::string& name) const {
  if (const auto it = external_.find(name); it != external_.end()) return it->second;
  throw RegistryError("no stored instance named '" + name + "'");
}

}  // namespace zofd
