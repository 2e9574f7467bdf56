#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "zofd/directions.hpp"
#include "zofd/linesearch.hpp"
#include "zofd/objective.hpp"

namespace zofd {

enum class ExperimentKind { timing, grad_error, optimize, profile, oracle };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view name);

struct ProblemEntry {
  ProblemSpec spec;
  std::string id;                         // defaults to "<name>-d<dim>"
  std::optional<Eigen::VectorXd> point;   // grad-error evaluation point
};

struct OracleGrid {
  std::vector<int> dims = {4, 6, 8};
  std::vector<std::string> ells = {"1", "2", "d/2", "d"};
  std::vector<double> hs = {0.1, 0.01};
  std::vector<std::string> functions = {"linear", "quadratic"};
  std::size_t samples = 100000;
  bool unbiasedness = true;
};

/// Parsed experiment configuration. `json` holds the merged input (file
/// fields plus command-line overrides) and is what config_hash() digests.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::optimize;
  std::vector<ProblemEntry> problems;
  std::vector<DirectionKind> kinds;
  std::vector<std::string> ells;
  std::vector<int> dims;  // timing grid
  std::string preset_name = "synthetic";
  FdConfig fd;            // preset with explicit overrides applied
  std::size_t budget = 10000;
  std::size_t repeats = 10;
  std::size_t trials = 50;
  std::uint64_t master_seed = 0;
  std::string out_dir;    // empty: nothing is written
  int jobs = 1;
  std::vector<double> taus;
  double tau_fixed = 1e-2;
  std::string profile_source = "optimize";
  std::size_t budget_points = 20;
  OracleGrid oracle;
  nlohmann::json json;
};

/// Builds a configuration from JSON; missing fields take per-experiment
/// defaults. Throws ConfigError on unknown experiments, kinds, problems,
/// malformed ell specs or invalid counts.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Resolves an ell spec against a dimension: an integer literal, "d",
/// "d/k" or "a*d/k" (also written "ad/k"). Fractions use the ceiling; the
/// result is clamped to [1, d]. Throws ConfigError on a malformed spec.
int resolve_ell(std::string_view spec, int d);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const ExperimentConfig& cfg);

/// `# config_hash=<hash>,master_seed=<seed>`
std::string output_header(const ExperimentConfig& cfg);

}  // namespace zofd
