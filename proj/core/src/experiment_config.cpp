#include "zofd/experiment_config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>

#include "zofd/errors.hpp"
#include "zofd/rng.hpp"

namespace zofd {

namespace {

using nlohmann::json;

constexpr std::array<DirectionKind, 8> kFigureKinds = {
    DirectionKind::gaussian,       DirectionKind::spherical,   DirectionKind::rademacher,
    DirectionKind::coordinate,     DirectionKind::qr_haar,     DirectionKind::butterfly,
    DirectionKind::householder,    DirectionKind::perm_householder};

std::vector<ProblemEntry> default_problems() {
  std::vector<ProblemEntry> out;
  ProblemEntry ls;
  ls.spec = {"least_squares", 50, 0, {{"L", 1e4}, {"mu", 1.0}}};
  out.push_back(ls);
  ProblemEntry qing;
  qing.spec = {"qing", 50, 0, {}};
  out.push_back(qing);
  ProblemEntry rosen;
  rosen.spec = {"rosenbrock", 50, 0, {}};
  out.push_back(rosen);
  return out;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::string ell_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ConfigError("ells entries must be integers or strings like \"d/2\"");
}

ProblemEntry parse_problem(const json& j) {
  if (!j.is_object()) throw ConfigError("problems entries must be objects");
  ProblemEntry entry;
  entry.spec.name = get_or<std::string>(j, "name", "");
  if (entry.spec.name.empty()) throw ConfigError("problem entry without a name");
  entry.spec.dim = get_or<int>(j, "d", 0);
  if (entry.spec.dim < 1) throw ConfigError("problem '" + entry.spec.name + "' needs d >= 1");
  entry.spec.seed = get_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("params")) {
    for (const auto& [key, value] : j.at("params").items()) {
      if (!value.is_number()) {
        throw ConfigError("problem '" + entry.spec.name + "' param '" + key + "' is not numeric");
      }
      entry.spec.params[key] = value.get<double>();
    }
  }
  entry.id = get_or<std::string>(j, "id", "");
  if (j.contains("point")) {
    const auto values = get_or<std::vector<double>>(j, "point", {});
    if (static_cast<int>(values.size()) != entry.spec.dim) {
      throw ConfigError("problem '" + entry.spec.name + "': point has the wrong length");
    }
    entry.point = Eigen::Map<const Eigen::VectorXd>(values.data(), entry.spec.dim);
  }
  return entry;
}

FdConfig parse_fd(const json& j, std::string& preset_name) {
  FdConfig fd;
  const json* overrides = nullptr;
  if (j.contains("preset")) {
    const json& p = j.at("preset");
    if (p.is_string()) {
      preset_name = p.get<std::string>();
    } else if (p.is_object()) {
      preset_name = get_or<std::string>(p, "base", "synthetic");
      overrides = &p;
    } else {
      throw ConfigError("preset must be a name or an object");
    }
  }
  try {
    fd = preset(preset_name);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  auto apply = [&fd](const json& src) {
    fd.h = get_or<double>(src, "h", fd.h);
    fd.gamma0 = get_or<double>(src, "gamma0", fd.gamma0);
    fd.gamma_min = get_or<double>(src, "gamma_min", fd.gamma_min);
    fd.gamma_max = get_or<double>(src, "gamma_max", fd.gamma_max);
    fd.c = get_or<double>(src, "c", fd.c);
    fd.theta = get_or<double>(src, "theta", fd.theta);
    fd.rho_exp = get_or<double>(src, "rho_exp", fd.rho_exp);
    fd.strict_eval = get_or<bool>(src, "strict_eval", fd.strict_eval);
  };
  if (overrides != nullptr) apply(*overrides);
  apply(j);  // top-level h etc. win over the preset object

  // ell and budget are checked per cell once ell specs are resolved.
  FdConfig fields_only = fd;
  fields_only.ell = 1;
  fields_only.budget = 3;
  try {
    validate(fields_only);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return fd;
}

OracleGrid parse_oracle(const json& j) {
  OracleGrid grid;
  if (!j.contains("oracle")) return grid;
  const json& o = j.at("oracle");
  grid.dims = get_or(o, "dims", grid.dims);
  if (o.contains("ells")) {
    grid.ells.clear();
    for (const auto& v : o.at("ells")) grid.ells.push_back(ell_text(v));
  }
  grid.hs = get_or(o, "hs", grid.hs);
  grid.functions = get_or(o, "functions", grid.functions);
  grid.samples = get_count(o, "samples", grid.samples);
  grid.unbiasedness = get_or(o, "unbiasedness", grid.unbiasedness);
  if (grid.samples < 1000) throw ConfigError("oracle.samples must be at least 1000");
  for (double h : grid.hs) {
    if (!(h > 0.0)) throw ConfigError("oracle.hs entries must be positive");
  }
  for (int d : grid.dims) {
    if (d < 1) throw ConfigError("oracle.dims entries must be positive");
  }
  for (const auto& f : grid.functions) {
    if (f != "linear" && f != "quadratic") {
      throw ConfigError("oracle.functions supports 'linear' and 'quadratic', got '" + f + "'");
    }
  }
  return grid;
}

bool parse_int(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::timing: return "timing";
    case ExperimentKind::grad_error: return "grad-error";
    case ExperimentKind::optimize: return "optimize";
    case ExperimentKind::profile: return "profile";
    case ExperimentKind::oracle: return "oracle";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto kind : {ExperimentKind::timing, ExperimentKind::grad_error, ExperimentKind::optimize,
                    ExperimentKind::profile, ExperimentKind::oracle}) {
    if (name == to_string(kind)) return kind;
  }
  if (name == "grad_error") return ExperimentKind::grad_error;
  throw ConfigError("unknown experiment '" + std::string(name) +
                    "' (expected timing, grad-error, optimize, profile or oracle)");
}

int resolve_ell(std::string_view spec, int d) {
  if (d < 1) throw ConfigError("resolve_ell: dimension must be positive");
  std::string s;
  for (char ch : spec) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  auto bad = [&]() -> ConfigError {
    return ConfigError("malformed ell spec '" + std::string(spec) +
                       "' (expected an integer, d, d/k or a*d/k)");
  };
  long long value = 0;
  if (parse_int(s, value)) {
    if (value < 1) throw bad();
    return static_cast<int>(std::min<long long>(value, d));
  }
  const auto dpos = s.find('d');
  if (dpos == std::string::npos) throw bad();
  long long num = 1;
  std::string head = s.substr(0, dpos);
  if (!head.empty()) {
    if (head.back() == '*') head.pop_back();
    if (!parse_int(head, num) || num < 1) throw bad();
  }
  long long den = 1;
  const std::string tail = s.substr(dpos + 1);
  if (!tail.empty()) {
    if (tail.front() != '/' || !parse_int(std::string_view(tail).substr(1), den) || den < 1) {
      throw bad();
    }
  }
  const long long ell = (num * d + den - 1) / den;
  return static_cast<int>(std::clamp<long long>(ell, 1, d));
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  ExperimentConfig cfg;
  cfg.json = j;
  cfg.experiment = parse_experiment_kind(get_or<std::string>(j, "experiment", "optimize"));
  const bool timing = cfg.experiment == ExperimentKind::timing;

  if (j.contains("problems")) {
    if (!j.at("problems").is_array()) throw ConfigError("problems must be an array");
    for (const auto& p : j.at("problems")) cfg.problems.push_back(parse_problem(p));
    if (cfg.problems.empty()) throw ConfigError("problem set is empty");
  } else if (!timing && cfg.experiment != ExperimentKind::oracle) {
    cfg.problems = default_problems();
  }
  for (auto& p : cfg.problems) {
    if (p.id.empty()) p.id = p.spec.name + "-d" + std::to_string(p.spec.dim);
  }

  if (j.contains("kinds")) {
    for (const auto& k : j.at("kinds")) {
      if (!k.is_string()) throw ConfigError("kinds entries must be strings");
      try {
        cfg.kinds.push_back(parse_direction_kind(k.get<std::string>()));
      } catch (const ParameterError& e) {
        throw ConfigError(e.what());
      }
    }
    if (cfg.kinds.empty()) throw ConfigError("kinds is empty");
  } else if (timing) {
    cfg.kinds.assign(kAllDirectionKinds.begin(), kAllDirectionKinds.end());
  } else {
    cfg.kinds.assign(kFigureKinds.begin(), kFigureKinds.end());
  }

  if (j.contains("ells")) {
    for (const auto& v : j.at("ells")) cfg.ells.push_back(ell_text(v));
    if (cfg.ells.empty()) throw ConfigError("ells is empty");
  } else if (timing) {
    cfg.ells = {"2", "d/3", "d/2", "d"};
  } else if (cfg.experiment == ExperimentKind::grad_error) {
    cfg.ells = {"1", "d/3", "d/2", "d"};
  } else {
    cfg.ells = {"d/3", "d/2", "d"};
  }
  for (const auto& e : cfg.ells) resolve_ell(e, 1024);  // syntax check only

  cfg.dims = get_or<std::vector<int>>(j, "dims", timing ? std::vector<int>{64, 128, 256, 512, 1024}
                                                        : std::vector<int>{});
  for (int d : cfg.dims) {
    if (d < 1) throw ConfigError("dims entries must be positive");
  }

  cfg.preset_name = "synthetic";
  cfg.fd = parse_fd(j, cfg.preset_name);
  cfg.budget = get_count(j, "budget", 10000);
  cfg.fd.budget = cfg.budget;

  cfg.repeats = get_count(j, "repeats", timing ? 500 : 10);
  cfg.trials = get_count(j, "trials", 50);
  if (timing && cfg.repeats < 2) throw ConfigError("timing needs repeats >= 2");
  if (!timing && cfg.repeats < 1) throw ConfigError("repeats must be positive");
  if (cfg.experiment == ExperimentKind::grad_error && cfg.trials < 1) {
    throw ConfigError("trial count must be positive");
  }

  cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  cfg.out_dir = get_or<std::string>(j, "out_dir", "");
  cfg.jobs = get_or<int>(j, "jobs", 1);
  if (cfg.jobs < 1) throw ConfigError("jobs must be positive");

  cfg.taus = get_or<std::vector<double>>(j, "taus", {});
  if (j.contains("taus") && cfg.taus.empty()) throw ConfigError("taus is empty");
  cfg.tau_fixed = get_or<double>(j, "tau_fixed", 1e-2);
  cfg.profile_source = get_or<std::string>(j, "profile_source", "optimize");
  if (cfg.profile_source != "optimize" && cfg.profile_source != "grad-error") {
    throw ConfigError("profile_source must be 'optimize' or 'grad-error'");
  }
  cfg.budget_points = get_count(j, "budget_points", 20);
  if (cfg.budget_points < 1) throw ConfigError("budget_points must be positive");
  cfg.oracle = parse_oracle(j);
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // Where results go and how many threads compute them do not change them.
  json canonical = cfg.json;
  if (canonical.is_object()) {
    canonical.erase("out_dir");
    canonical.erase("jobs");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical.dump())));
  return buf;
}

std::string output_header(const ExperimentConfig& cfg) {
  return "# config_hash=" + config_hash(cfg) + ",master_seed=" + std::to_string(cfg.master_seed);
}

}  // namespace zofd
