// zofd: command-line front end for the experiment drivers.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "zofd/directions.hpp"
#include "zofd/errors.hpp"
#include "zofd/experiments.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::vector<int> dims;
  std::vector<std::string> ells;
  std::vector<std::string> kinds;
  std::vector<std::string> problems;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> trials;
  std::string preset;
  std::optional<double> h;
};

void add_experiment_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (default: $ZOFD_OUT, else ./zofd-out)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--dim", o.dims, "dimension(s); replaces problem or grid dimensions");
  cmd->add_option("--ell", o.ells, "direction count(s): integer, d, d/k or a*d/k");
  cmd->add_option("--kind", o.kinds, "generator kind(s)");
  cmd->add_option("--problem", o.problems, "problem name(s) from list-problems");
  cmd->add_option("--budget", o.budget, "evaluation budget per run");
  cmd->add_option("--repeats", o.repeats, "repetitions per cell");
  cmd->add_option("--trials", o.trials, "direction draws per grad-error cell");
  cmd->add_option("--preset", o.preset, "line-search preset")
      ->check(CLI::IsMember({"synthetic", "cutest", "adversarial"}));
  cmd->add_option("--h", o.h, "finite-difference step");
}

json load_config(const Overrides& o, const std::string& experiment) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw zofd::ConfigError(o.config_path + ": " + e.what());
    }
    if (j.contains("experiment") && j["experiment"] != experiment &&
        !(experiment == "grad-error" && j["experiment"] == "grad_error")) {
      throw zofd::ConfigError("config is for '" + j["experiment"].get<std::string>() +
                              "', not '" + experiment + "'");
    }
  }
  j["experiment"] = experiment;

  if (!o.problems.empty()) {
    json problems = json::array();
    for (const auto& name : o.problems) problems.push_back({{"name", name}, {"d", 50}});
    j["problems"] = problems;
  }
  if (!o.dims.empty()) {
    if (experiment == "timing") {
      j["dims"] = o.dims;
    } else if (experiment == "oracle") {
      j["oracle"]["dims"] = o.dims;
    } else {
      if (!j.contains("problems")) {
        zofd::ExperimentConfig defaults = zofd::parse_config(json{{"experiment", experiment}});
        json problems = json::array();
        for (const auto& p : defaults.problems) {
          problems.push_back({{"name", p.spec.name}, {"params", p.spec.params}});
        }
        j["problems"] = problems;
      }
      json expanded = json::array();
      for (const auto& p : j["problems"]) {
        for (int d : o.dims) {
          json q = p;
          q["d"] = d;
          q.erase("id");
          q.erase("point");
          expanded.push_back(q);
        }
      }
      j["problems"] = expanded;
    }
  }
  if (!o.ells.empty()) {
    if (experiment == "oracle") {
      j["oracle"]["ells"] = o.ells;
    } else {
      j["ells"] = o.ells;
    }
  }
  if (!o.kinds.empty()) j["kinds"] = o.kinds;
  if (o.seed) j["master_seed"] = *o.seed;
  if (o.jobs) j["jobs"] = *o.jobs;
  if (o.budget) j["budget"] = *o.budget;
  if (o.repeats) j["repeats"] = *o.repeats;
  if (o.trials) j["trials"] = *o.trials;
  if (!o.preset.empty()) j["preset"] = o.preset;
  if (o.h) j["h"] = *o.h;

  if (!o.out.empty()) {
    j["out_dir"] = o.out;
  } else if (!j.contains("out_dir")) {
    const char* env = std::getenv("ZOFD_OUT");
    j["out_dir"] = (env != nullptr && *env != '\0') ? env : "zofd-out";
  }
  return j;
}

int run_experiment(const std::string& name, const Overrides& o) {
  const zofd::ExperimentConfig cfg = zofd::parse_config(load_config(o, name));
  const zofd::ProblemRegistry registry = zofd::ProblemRegistry::with_builtins();
  std::cout << zofd::output_header(cfg) << '\n';
  switch (cfg.experiment) {
    case zofd::ExperimentKind::timing: {
      const auto rows = zofd::cmd_timing(cfg);
      std::cout << rows.size() << " timing rows -> " << cfg.out_dir << "/timing.csv\n";
      return 0;
    }
    case zofd::ExperimentKind::grad_error: {
      const auto rows = zofd::cmd_grad_error(cfg, registry);
      std::cout << rows.size() << " rows -> " << cfg.out_dir << "/grad_error.csv\n";
      return 0;
    }
    case zofd::ExperimentKind::optimize: {
      const auto result = zofd::cmd_optimize(cfg, registry);
      std::size_t failed = 0;
      for (const auto& r : result.rows) failed += r.error.empty() ? 0 : 1;
      std::cout << result.rows.size() << " runs -> " << cfg.out_dir << "/optimize.csv";
      if (failed > 0) std::cout << " (" << failed << " failed, see errors.csv)";
      std::cout << '\n';
      return 0;
    }
    case zofd::ExperimentKind::profile: {
      const auto curves = zofd::cmd_profile(cfg, registry);
      std::cout << curves.size() << " curves -> " << cfg.out_dir << "/profile_curve.csv\n";
      return 0;
    }
    case zofd::ExperimentKind::oracle: {
      const auto result = zofd::cmd_oracle(cfg);
      std::size_t bad = 0;
      for (const auto& r : result.reports) {
        if (!r.inequality_holds || !r.gap_identity_holds) ++bad;
      }
      for (const auto& u : result.unbiasedness) bad += u.passed ? 0 : 1;
      std::cout << result.reports.size() << " cells, " << bad << " failing checks -> "
                << cfg.out_dir << "/oracle.json\n"
                << (result.passed ? "PASS" : "FAIL") << '\n';
      return result.passed ? 0 : 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference optimization with structured random directions"};
  // --h is the finite-difference step, so help is only --help.
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"timing", "time direction-matrix generation"},
      {"grad-error", "relative error of the gradient estimator"},
      {"optimize", "run the line-search method over a problem grid"},
      {"profile", "fraction-solved curves"},
      {"oracle", "Monte-Carlo check of the smoothing lemma (exit 1 on failure)"}};
  Overrides overrides;
  std::vector<std::pair<CLI::App*, std::string>> experiment_cmds;
  for (const auto& [name, help] : experiments) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_experiment_flags(cmd, overrides);
    experiment_cmds.emplace_back(cmd, name);
  }

  CLI::App* list_cmd = app.add_subcommand("list-problems", "list registered problems");

  CLI::App* dump_cmd = app.add_subcommand("dump-directions", "write one direction matrix as CSV");
  std::string dump_kind = "qr_haar";
  int dump_dim = 8;
  std::string dump_ell = "d";
  std::uint64_t dump_seed = 0;
  std::string dump_out;
  dump_cmd->add_option("--kind", dump_kind, "generator kind");
  dump_cmd->add_option("--dim", dump_dim, "dimension")->check(CLI::PositiveNumber);
  dump_cmd->add_option("--ell", dump_ell, "direction count");
  dump_cmd->add_option("--seed", dump_seed, "seed");
  dump_cmd->add_option("--out", dump_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [cmd, name] : experiment_cmds) {
      if (cmd->parsed()) return run_experiment(name, overrides);
    }
    if (list_cmd->parsed()) {
      for (const auto& e : zofd::ProblemRegistry::with_builtins().list()) {
        std::cout << e.name << "\t" << e.description << '\n';
      }
      return 0;
    }
    if (dump_cmd->parsed()) {
      const zofd::DirectionKind kind = zofd::parse_direction_kind(dump_kind);
      const int ell = zofd::resolve_ell(dump_ell, dump_dim);
      zofd::RngStream rng(dump_seed, zofd::derive_stream_id({"dump", zofd::to_string(kind)}));
      const zofd::DirectionMatrix p = zofd::generate(kind, dump_dim, ell, rng);
      if (dump_out.empty()) {
        zofd::write_direction_csv(std::cout, p, dump_seed);
      } else {
        std::ofstream out(dump_out);
        if (!out) throw std::runtime_error("cannot open " + dump_out);
        zofd::write_direction_csv(out, p, dump_seed);
      }
      return 0;
    }
  } catch (const zofd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
