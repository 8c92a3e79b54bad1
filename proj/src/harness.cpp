#include "sadp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "sadp/critic.hpp"
#include "sadp/errors.hpp"
#include "sadp/model_kf.hpp"

namespace sadp {

namespace {

// Plant states beyond this norm are treated as a divergent run.
constexpr double kStateLimit = 1e6;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

SimTrace run_closed_loop(const SimConfig& cfg, std::uint64_t seed) {
  return run_closed_loop(cfg, seed, nullptr);
}

SimTrace run_closed_loop(const SimConfig& cfg, std::uint64_t seed, const CriticObserver& observer) {
  validate(cfg);
  const PlantModel plant = cfg.plant_model();
  const RunningCost cost = cfg.running_cost();
  const Regressor reg(plant.n, plant.m);
  const Eigen::Index steps = cfg.step_count();

  SimTrace trace;
  trace.n = plant.n;
  trace.m = plant.m;
  trace.config_hash = config_hash(cfg);
  trace.seed = seed;
  trace.records.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(steps, 0)));

  MeasurementChannel channel(cfg.sigma, seed);
  ModelEstimate est =
      ModelEstimate::initial(plant.n, plant.m, cfg.L, cfg.p0, cfg.q_kf, cfg.effective_r_kf());
  SampleStack samples(plant.n, plant.m, cfg.L);
  CriticWeights critic = CriticWeights::ones(reg, cfg.alpha, cfg.n_critic_iter);
  const Eigen::Index horizon = uses_stack(cfg.controller) ? cfg.N : 1;
  ControlStack controls = ControlStack::filled(plant.m, horizon, 0.0, cfg.beta, cfg.n_actor_iter);
  const Vector u_init = cfg.initial_control();
  for (Eigen::Index i = 0; i < horizon; ++i) controls.u.segment(i * plant.m, plant.m) = u_init;

  Vector x = cfg.x0;
  try {
    for (Eigen::Index k = 0; k < steps; ++k) {
      const Vector y = channel.measure(x);
      const Vector& x_ctrl = cfg.noise_wiring == NoiseWiring::both ? y : x;

      samples.push_state(y);
      if (samples.transition_count() > 0) est = kf_correct(kf_predict(est), samples);

      const Vector u_prev = controls.first();
      const Vector x_pred = predict_state(est, x_ctrl, u_prev);

      TraceRecord rec;
      rec.bellman_err_final = std::numeric_limits<double>::quiet_NaN();
      if (uses_critic(cfg.controller)) {
        const Transition t{x_ctrl, u_prev, x_pred, cost(x_ctrl, u_prev), std::nullopt};
        CriticEpisode episode = critic_update(reg, critic, t);
        if (observer) observer(k, critic, t, episode);
        critic = std::move(episode.weights);
        rec.bellman_errors = std::move(episode.errors);
        rec.bellman_err_final = episode.final_error;
      }

      switch (cfg.controller) {
        case ControllerKind::gd:
          controls.u = gd_update(u_prev, x_pred, est.B, cfg.beta);
          if (!controls.u.allFinite()) throw DivergenceError("gd_update: control became non-finite");
          break;
        case ControllerKind::adpq:
          controls.u = adpq_update(reg, u_prev, x_pred, critic.w, cfg.beta, cfg.n_actor_iter);
          break;
        case ControllerKind::sadpq:
          controls = sadpq_update(reg, controls, critic.w, est, x_ctrl, cfg.gradient_mode);
          break;
        case ControllerKind::mpc:
          controls = mpc_update(controls, cost, est, x_ctrl);
          break;
      }
      if (cfg.u_clamp > 0.0) controls.u = controls.u.cwiseMax(-cfg.u_clamp).cwiseMin(cfg.u_clamp);

      const Vector u = controls.first();
      rec.t = static_cast<double>(k) * cfg.dt;
      rec.x_true = x;
      rec.y = y;
      rec.u = u;
      rec.r = cost(x, u);
      rec.q_hat = q_value(reg, critic.w, x_ctrl, u);
      rec.vec_a = row_major(est.A);
      rec.vec_b = row_major(est.B);
      trace.records.push_back(std::move(rec));

      samples.push_control(u);
      x = step_true(plant, x, u);
      if (!x.allFinite() || x.norm() > kStateLimit) {
        throw DivergenceError("plant state left the finite region at step " + std::to_string(k));
      }
      controls.shift();
    }
  } catch (const DivergenceError& e) {
    trace.status = RunStatus::diverged;
    trace.failure = e.what();
  } catch (const std::runtime_error& e) {
    // Identifier breakdown (singular innovation covariance).
    trace.status = RunStatus::diverged;
    trace.failure = e.what();
  }
  return trace;
}

SimTrace run_closed_loop(const SimConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
  return run_closed_loop(cfg, cfg.seeds.front());
}

std::optional<double> time_to_threshold(const SimTrace& trace, double x0_norm, double threshold,
                                        int sustain_steps) {
  const double bound = threshold * x0_norm;
  int run = 0;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    run = trace.records[k].x_true.norm() <= bound ? run + 1 : 0;
    if (run >= sustain_steps) return trace.records[k + 1 - static_cast<std::size_t>(run)].t;
  }
  return std::nullopt;
}

double cumulative_cost(const SimTrace& trace) {
  double total = 0.0;
  for (const auto& rec : trace.records) total += rec.r;
  return total;
}

std::string_view to_string(CellStatus status) {
  switch (status) {
    case CellStatus::reached: return "reached";
    case CellStatus::not_reached: return "not_reached";
    case CellStatus::diverged: return "diverged";
  }
  return "?";
}

const ControllerSummary& ComparisonReport::summary(ControllerKind kind) const {
  for (const auto& s : summaries) {
    if (s.controller == kind) return s;
  }
  throw std::out_of_range("no summary for controller " + std::string(to_string(kind)));
}

ComparisonReport compare_schemes(const SimConfig& cfg, const std::vector<ControllerKind>& controllers,
                                 const std::vector<std::uint64_t>& seeds) {
  if (controllers.size() < 2) throw ConfigError("compare needs at least two controllers");
  if (seeds.empty()) throw ConfigError("compare needs at least one seed");
  validate(cfg);

  ComparisonReport report;
  report.horizon = cfg.T;
  for (ControllerKind c : controllers) {
    for (std::uint64_t s : seeds) report.cells.push_back(ComparisonCell{c, s, {}, 0.0, {}, {}});
  }

  const double x0_norm = cfg.x0.norm();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < report.cells.size(); i = next++) {
      ComparisonCell& cell = report.cells[i];
      SimConfig run_cfg = cfg;
      run_cfg.controller = cell.controller;
      const SimTrace trace = run_closed_loop(run_cfg, cell.seed);
      cell.cumulative_cost = cumulative_cost(trace);
      if (trace.status == RunStatus::diverged) {
        cell.status = CellStatus::diverged;
        cell.failure = trace.failure;
        continue;
      }
      cell.time_to_threshold = time_to_threshold(trace, x0_norm, cfg.threshold, cfg.sustain_steps);
      cell.status = cell.time_to_threshold ? CellStatus::reached : CellStatus::not_reached;
    }
  };
  const std::size_t threads = std::min<std::size_t>(
      std::max(1u, std::thread::hardware_concurrency()), report.cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t c = 0; c < controllers.size(); ++c) {
    ControllerSummary s{controllers[c], 0.0, 0.0, 0, 0};
    std::vector<double> times;
    std::vector<double> costs;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      const ComparisonCell& cell = report.cells[c * seeds.size() + j];
      times.push_back(cell.score(cfg.T));
      costs.push_back(cell.cumulative_cost);
      s.reached += cell.status == CellStatus::reached;
      ++s.runs;
    }
    s.median_time_to_threshold = median(times);
    s.median_cumulative_cost = median(costs);
    report.summaries.push_back(s);
  }
  return report;
}

namespace {

void write_blocks(const ComparisonReport& report, std::ostream& out, const std::string& prefix_header,
                  const std::string& prefix, bool cell_header, bool summary_header,
                  std::vector<std::string>& summary_lines) {
  if (cell_header) out << prefix_header << "controller,seed,time_to_threshold_s,cumulative_cost,status\n";
  for (const auto& cell : report.cells) {
    out << prefix << to_string(cell.controller) << ',' << cell.seed << ','
        << (cell.time_to_threshold ? fmt(*cell.time_to_threshold) : std::string("nan")) << ','
        << fmt(cell.cumulative_cost) << ',' << to_string(cell.status) << '\n';
  }
  if (summary_header) {
    summary_lines.push_back(prefix_header +
                            "controller,median_time_to_threshold_s,median_cumulative_cost,reached,runs");
  }
  for (const auto& s : report.summaries) {
    summary_lines.push_back(prefix + std::string(to_string(s.controller)) + ',' +
                            fmt(s.median_time_to_threshold) + ',' + fmt(s.median_cumulative_cost) +
                            ',' + std::to_string(s.reached) + ',' + std::to_string(s.runs));
  }
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceIoError("cannot open " + path.string() + " for writing");
  writer(out);
  out.flush();
  if (!out) throw TraceIoError("failed writing " + path.string());
}

}  // namespace

void write_report(const ComparisonReport& report, std::ostream& out) {
  std::vector<std::string> summary;
  write_blocks(report, out, "", "", true, true, summary);
  out << '\n';
  for (const auto& line : summary) out << line << '\n';
}

void write_report(const ComparisonReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_report(report, out); });
}

SweepReport sweep(const SimConfig& cfg, const std::string& parameter,
                  const std::vector<std::string>& values,
                  const std::vector<ControllerKind>& controllers,
                  const std::vector<std::uint64_t>& seeds) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  SweepReport report{parameter, {}};
  for (const auto& value : values) {
    SimConfig point = cfg;
    set_field(point, parameter, value);
    report.points.push_back(SweepPoint{value, compare_schemes(point, controllers, seeds)});
  }
  return report;
}

void write_sweep(const SweepReport& report, std::ostream& out) {
  std::vector<std::string> summary;
  bool first = true;
  for (const auto& point : report.points) {
    write_blocks(point.report, out, "parameter,value,", report.parameter + ',' + point.value + ',',
                 first, first, summary);
    first = false;
  }
  out << '\n';
  for (const auto& line : summary) out << line << '\n';
}

void write_sweep(const SweepReport& report, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_sweep(report, out); });
}

}  // namespace sadp
