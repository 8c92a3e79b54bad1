// Command-line front end: single runs, scheme comparisons and parameter sweeps.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sadp/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDiverged = 2, kIoError = 3 };

struct Overrides {
  std::map<std::string, std::string> values;

  void attach(CLI::App& cmd, const std::string& skip = {}) {
    for (const auto& key : sadp::config_keys()) {
      if (key == skip) continue;
      cmd.add_option_function<std::string>(
          "--" + key, [this, key](const std::string& v) { values[key] = v; },
          "override config field '" + key + "'");
    }
  }
};

sadp::SimConfig build_config(const std::string& config_path, const Overrides& overrides) {
  sadp::SimConfig cfg;
  if (!config_path.empty()) cfg = sadp::load_config(config_path);
  for (const auto& [key, value] : overrides.values) sadp::set_field(cfg, key, value);
  sadp::validate(cfg);
  return cfg;
}

std::vector<sadp::ControllerKind> parse_controllers(const std::vector<std::string>& names) {
  std::vector<sadp::ControllerKind> kinds;
  for (const auto& name : names) {
    try {
      kinds.push_back(sadp::parse_controller(name));
    } catch (const std::invalid_argument& e) {
      throw sadp::ConfigError(e.what());
    }
  }
  return kinds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stacked adaptive dynamic programming closed-loop harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;

  auto* run = app.add_subcommand("run", "simulate one closed loop and write its trace");
  Overrides run_overrides;
  std::uint64_t seed = 0;
  std::string controller;
  std::string bellman_path;
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--seed", seed, "noise seed")->required();
  run->add_option("--out", out_path, "trace CSV path")->required();
  run->add_option("--controller", controller, "gd | adpq | sadpq | mpc")->required();
  run->add_option("--bellman-out", bellman_path, "per-iteration critic errors CSV");
  run_overrides.attach(*run, "controller");

  auto* compare = app.add_subcommand("compare", "run several controllers over several seeds");
  Overrides cmp_overrides;
  std::vector<std::string> controllers{"gd", "adpq", "sadpq", "mpc"};
  compare->add_option("--config", config_path, "key = value config file");
  compare->add_option("--out", out_path, "report CSV path (stdout if omitted)");
  compare->add_option("--controllers", controllers, "controllers to compare")->delimiter(',');
  cmp_overrides.attach(*compare);

  auto* sweep_cmd = app.add_subcommand("sweep", "compare controllers over a grid of one field");
  Overrides sweep_overrides;
  std::string parameter;
  std::vector<std::string> values;
  sweep_cmd->add_option("--config", config_path, "key = value config file");
  sweep_cmd->add_option("--out", out_path, "report CSV path (stdout if omitted)");
  sweep_cmd->add_option("--controllers", controllers, "controllers to compare")->delimiter(',');
  sweep_cmd->add_option("--param", parameter, "config field to vary")->required();
  sweep_cmd->add_option("--values", values, "values of the field (space separated)")->required();
  sweep_overrides.attach(*sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      run_overrides.values["controller"] = controller;
      const sadp::SimConfig cfg = build_config(config_path, run_overrides);
      const sadp::SimTrace trace = sadp::run_closed_loop(cfg, seed);
      sadp::write_trace(trace, std::filesystem::path(out_path));
      if (!bellman_path.empty()) sadp::write_bellman_errors(trace, bellman_path);
      std::fprintf(stderr, "config_hash=%016llx seed=%llu steps=%zu\n",
                   static_cast<unsigned long long>(trace.config_hash),
                   static_cast<unsigned long long>(trace.seed), trace.records.size());
      if (trace.status == sadp::RunStatus::diverged) {
        std::cerr << "run diverged: " << trace.failure << '\n';
        return kDiverged;
      }
      return kOk;
    }

    const bool is_sweep = static_cast<bool>(*sweep_cmd);
    const sadp::SimConfig cfg =
        build_config(config_path, is_sweep ? sweep_overrides : cmp_overrides);
    const auto kinds = parse_controllers(controllers);
    if (is_sweep) {
      if (parameter == "seeds") throw sadp::ConfigError("seeds cannot be swept");
      const auto report = sadp::sweep(cfg, parameter, values, kinds, cfg.seeds);
      if (out_path.empty()) sadp::write_sweep(report, std::cout);
      else sadp::write_sweep(report, std::filesystem::path(out_path));
    } else {
      const auto report = sadp::compare_schemes(cfg, kinds, cfg.seeds);
      if (out_path.empty()) sadp::write_report(report, std::cout);
      else sadp::write_report(report, std::filesystem::path(out_path));
    }
    return kOk;
  } catch (const sadp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const sadp::TraceIoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  }
}
