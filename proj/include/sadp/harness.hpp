#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sadp/config.hpp"
#include "sadp/trace.hpp"

namespace sadp {

/// Simulates one closed-loop run. Each step k:
///   1. y_k = measure(x_k)
///   2. push y_k to the sample stack; KF predict + correct once a transition exists
///   3. x̂_{k+1} = A y_k + B u_k⁻ with u_k⁻ the first slot of the control stack
///   4. adpq/sadpq: critic episode on (y_k, u_k⁻, x̂_{k+1}, r(y_k, u_k⁻))
///   5. controller update (gd, adpq, sadpq or mpc)
///   6. apply the first slot u_k, push it to the sample stack, x_{k+1} = f(x_k, u_k)
///   7. shift the control stack
/// With noise_wiring = kf_only, steps 3-5 use x_k instead of y_k.
///
/// Divergence (critic, actor, identifier or a non-finite plant state) stops
/// the run and is reported through SimTrace::status; it never throws.
SimTrace run_closed_loop(const SimConfig& cfg, std::uint64_t seed);

/// Called after every critic episode with the weights it started from.
using CriticObserver = std::function<void(Eigen::Index step, const CriticWeights& before,
                                          const Transition& transition,
                                          const CriticEpisode& episode)>;

SimTrace run_closed_loop(const SimConfig& cfg, std::uint64_t seed, const CriticObserver& observer);

/// Runs with the first configured seed.
SimTrace run_closed_loop(const SimConfig& cfg);

/// Start time of the first window of `sustain_steps` consecutive records with
/// ‖x_true‖ ≤ threshold·‖x0‖.
std::optional<double> time_to_threshold(const SimTrace& trace, double x0_norm, double threshold,
                                        int sustain_steps);

double cumulative_cost(const SimTrace& trace);

enum class CellStatus { reached, not_reached, diverged };

std::string_view to_string(CellStatus status);

struct ComparisonCell {
  ControllerKind controller;
  std::uint64_t seed = 0;
  std::optional<double> time_to_threshold;
  double cumulative_cost = 0.0;
  CellStatus status = CellStatus::not_reached;
  std::string failure;

  /// Time to threshold, or the horizon T if never reached.
  double score(double horizon) const { return time_to_threshold.value_or(horizon); }
};

struct ControllerSummary {
  ControllerKind controller;
  double median_time_to_threshold = 0.0;  // unreached cells score T
  double median_cumulative_cost = 0.0;
  int reached = 0;
  int runs = 0;
};

struct ComparisonReport {
  double horizon = 0.0;
  std::vector<ComparisonCell> cells;  // ordered by (controller list order, seed order)
  std::vector<ControllerSummary> summaries;

  const ControllerSummary& summary(ControllerKind kind) const;
};

/// Runs every (controller, seed) cell of cfg, overriding cfg.controller.
/// Cells run on worker threads; the result does not depend on scheduling.
/// Throws ConfigError for fewer than two controllers or no seeds.
ComparisonReport compare_schemes(const SimConfig& cfg, const std::vector<ControllerKind>& controllers,
                                 const std::vector<std::uint64_t>& seeds);

/// Two CSV blocks separated by a blank line:
///   controller,seed,time_to_threshold_s,cumulative_cost,status
///   controller,median_time_to_threshold_s,median_cumulative_cost,reached,runs
void write_report(const ComparisonReport& report, std::ostream& out);
void write_report(const ComparisonReport& report, const std::filesystem::path& path);

struct SweepPoint {
  std::string value;
  ComparisonReport report;
};

struct SweepReport {
  std::string parameter;
  std::vector<SweepPoint> points;
};

/// compare_schemes at every value of one config field.
SweepReport sweep(const SimConfig& cfg, const std::string& parameter,
                  const std::vector<std::string>& values,
                  const std::vector<ControllerKind>& controllers,
                  const std::vector<std::uint64_t>& seeds);

/// Same blocks as write_report with leading `parameter,value` columns.
void write_sweep(const SweepReport& report, std::ostream& out);
void write_sweep(const SweepReport& report, const std::filesystem::path& path);

}  // namespace sadp
