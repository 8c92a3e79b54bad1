#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sadp/harness.hpp"

namespace sadp {
namespace {

namespace fs = std::filesystem;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SimConfig quiet(ControllerKind controller, double T = 0.05) {
  SimConfig cfg;
  cfg.controller = controller;
  cfg.sigma = 0.0;
  cfg.T = T;
  return cfg;
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() /
                       ("sadp_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(SADP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Values from an independent NumPy re-implementation of the same loop
// (sigma = 0, 50 steps, case-study settings).
struct Golden {
  ControllerKind controller;
  double u0, u9, u24, u49;
  double x49_1, x49_2;
};

constexpr Golden kGolden[] = {
    {ControllerKind::gd, 0.9999, 0.9977775815419312, 0.993814389050773, 0.9872338014247762,
     -0.4961025405549577, 1.0380399280764143},
    {ControllerKind::adpq, 0.9994447675080146, 0.9860452582393078, 0.9315783717686569,
     0.7893350944710072, -0.44046897907068494, 0.9078278649050812},
    {ControllerKind::sadpq, 0.9994447675080146, 0.9695413988483753, 0.8441658479313682,
     0.60920815714323, -0.3803647271622707, 0.7734706576852602},
    {ControllerKind::mpc, 0.9998, 0.9956631315185718, 0.9877670552766625, 0.9746989279375315,
     -0.49271976176942167, 1.0300894022887221},
};

TEST(Harness, GoldenTraces) {
  for (const Golden& g : kGolden) {
    SCOPED_TRACE(std::string(to_string(g.controller)));
    const SimTrace trace = run_closed_loop(quiet(g.controller));
    ASSERT_EQ(trace.status, RunStatus::ok);
    ASSERT_EQ(trace.records.size(), 50u);
    EXPECT_NEAR(trace.records[0].u(0), g.u0, 1e-10);
    EXPECT_NEAR(trace.records[9].u(0), g.u9, 1e-10);
    EXPECT_NEAR(trace.records[24].u(0), g.u24, 1e-10);
    EXPECT_NEAR(trace.records[49].u(0), g.u49, 1e-10);
    EXPECT_NEAR(trace.records[49].x_true(0), g.x49_1, 1e-10);
    EXPECT_NEAR(trace.records[49].x_true(1), g.x49_2, 1e-10);
  }
}

TEST(Harness, OriginStaysAtRest) {
  for (auto c : {ControllerKind::gd, ControllerKind::adpq, ControllerKind::sadpq, ControllerKind::mpc}) {
    SimConfig cfg = quiet(c, 0.2);
    cfg.x0 = vec({0, 0});
    cfg.u0 = vec({0});
    const SimTrace trace = run_closed_loop(cfg);
    ASSERT_EQ(trace.status, RunStatus::ok);
    for (const auto& rec : trace.records) {
      EXPECT_TRUE(rec.x_true.isZero());
      EXPECT_EQ(rec.r, 0.0);
    }
  }
}

TEST(Harness, TraceLengthAndRecordLayout) {
  SimConfig cfg = quiet(ControllerKind::sadpq, 0.1234);
  const SimTrace trace = run_closed_loop(cfg);
  ASSERT_EQ(trace.records.size(), 123u);
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& rec = trace.records[k];
    EXPECT_DOUBLE_EQ(rec.t, static_cast<double>(k) * 1e-3);
    EXPECT_EQ(rec.vec_a.size(), 4);
    EXPECT_EQ(rec.vec_b.size(), 2);
    EXPECT_EQ(rec.bellman_errors.size(), 20u);
    EXPECT_EQ(rec.y, rec.x_true);  // sigma = 0
  }
  const SimTrace gd = run_closed_loop(quiet(ControllerKind::gd));
  EXPECT_TRUE(std::isnan(gd.records[3].bellman_err_final));
  EXPECT_TRUE(gd.records[3].bellman_errors.empty());
}

TEST(Harness, RunsAreDeterministic) {
  SimConfig cfg = quiet(ControllerKind::sadpq, 0.3);
  cfg.sigma = 0.05;
  std::ostringstream a, b, c;
  write_trace(run_closed_loop(cfg, 5), a);
  write_trace(run_closed_loop(cfg, 5), b);
  write_trace(run_closed_loop(cfg, 6), c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
  EXPECT_EQ(run_closed_loop(cfg, 5).config_hash, config_hash(cfg));
}

TEST(Harness, NoiseWiringKfOnlyFeedsTrueStateToController) {
  SimConfig cfg = quiet(ControllerKind::adpq, 0.02);
  cfg.sigma = 0.1;
  cfg.noise_wiring = NoiseWiring::kf_only;
  std::vector<Vector> critic_states;
  const SimTrace trace = run_closed_loop(cfg, 1, [&](Eigen::Index, const CriticWeights&,
                                                     const Transition& t, const CriticEpisode&) {
    critic_states.push_back(t.x_k);
  });
  ASSERT_EQ(critic_states.size(), trace.records.size());
  for (std::size_t k = 0; k < critic_states.size(); ++k) {
    EXPECT_EQ(critic_states[k], trace.records[k].x_true);
    EXPECT_NE(trace.records[k].y, trace.records[k].x_true);
  }
}

TEST(Harness, DivergenceIsRecordedNotThrown) {
  SimConfig cfg = quiet(ControllerKind::adpq, 1.0);
  cfg.beta = 50.0;
  const SimTrace trace = run_closed_loop(cfg);
  EXPECT_EQ(trace.status, RunStatus::diverged);
  EXPECT_FALSE(trace.failure.empty());
  EXPECT_LT(trace.records.size(), 1000u);
}

TEST(Harness, ClampBoundsControls) {
  SimConfig cfg = quiet(ControllerKind::gd, 0.01);
  cfg.u0 = vec({5});
  cfg.u_clamp = 0.5;
  for (const auto& rec : run_closed_loop(cfg).records) EXPECT_LE(std::abs(rec.u(0)), 0.5);
}

TEST(Metrics, TimeToThreshold) {
  SimTrace trace;
  const double norms[] = {1.0, 0.05, 0.05, 0.5, 0.05, 0.05, 0.05, 0.05};
  for (int k = 0; k < 8; ++k) {
    TraceRecord rec;
    rec.t = k * 0.5;
    rec.x_true = vec({norms[k], 0});
    rec.r = 1.0;
    trace.records.push_back(rec);
  }
  EXPECT_EQ(time_to_threshold(trace, 1.0, 0.1, 3), 2.0);
  EXPECT_EQ(time_to_threshold(trace, 1.0, 0.1, 2), 0.5);
  EXPECT_FALSE(time_to_threshold(trace, 1.0, 0.1, 5).has_value());
  EXPECT_EQ(cumulative_cost(trace), 8.0);
}

TEST(Compare, DuplicateControllerGivesIdenticalColumns) {
  SimConfig cfg = quiet(ControllerKind::sadpq, 0.5);
  cfg.sigma = 0.01;
  const auto report = compare_schemes(cfg, {ControllerKind::sadpq, ControllerKind::sadpq}, {1, 2, 3});
  ASSERT_EQ(report.cells.size(), 6u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(report.cells[i].cumulative_cost, report.cells[i + 3].cumulative_cost);
    EXPECT_EQ(report.cells[i].time_to_threshold, report.cells[i + 3].time_to_threshold);
    EXPECT_EQ(report.cells[i].seed, report.cells[i + 3].seed);
  }
  EXPECT_EQ(report.summaries[0].median_time_to_threshold,
            report.summaries[1].median_time_to_threshold);
}

TEST(Compare, FrozenControlNeverReachesThreshold) {
  SimConfig cfg = quiet(ControllerKind::sadpq, 0.5);
  cfg.beta = 0.0;
  const auto report = compare_schemes(
      cfg, {ControllerKind::gd, ControllerKind::adpq, ControllerKind::sadpq, ControllerKind::mpc}, {0, 1});
  for (const auto& cell : report.cells) EXPECT_EQ(cell.status, CellStatus::not_reached);
  for (const auto& s : report.summaries) {
    EXPECT_EQ(s.reached, 0);
    EXPECT_EQ(s.median_time_to_threshold, cfg.T);
  }
  std::ostringstream out;
  write_report(report, out);
  EXPECT_NE(out.str().find("gd,0,nan,"), std::string::npos);
  EXPECT_NE(out.str().find("\n\ncontroller,median_time_to_threshold_s"), std::string::npos);
}

TEST(Compare, Preconditions) {
  SimConfig cfg = quiet(ControllerKind::sadpq);
  EXPECT_THROW(compare_schemes(cfg, {ControllerKind::gd}, {0}), ConfigError);
  EXPECT_THROW(compare_schemes(cfg, {ControllerKind::gd, ControllerKind::mpc}, {}), ConfigError);
}

TEST(Compare, DivergedCellsAreReported) {
  SimConfig cfg = quiet(ControllerKind::sadpq, 1.0);
  cfg.beta = 50.0;
  const auto report = compare_schemes(cfg, {ControllerKind::adpq, ControllerKind::gd}, {0});
  EXPECT_EQ(report.cells[0].status, CellStatus::diverged);
  EXPECT_EQ(report.summary(ControllerKind::adpq).median_time_to_threshold, 1.0);
}

TEST(Sweep, OneReportPerValue) {
  SimConfig cfg = quiet(ControllerKind::sadpq, 0.2);
  const auto report = sweep(cfg, "N", {"1", "2"}, {ControllerKind::sadpq, ControllerKind::mpc}, {0});
  ASSERT_EQ(report.points.size(), 2u);
  EXPECT_NE(report.points[0].report.cells[0].cumulative_cost,
            report.points[1].report.cells[0].cumulative_cost);
  std::ostringstream out;
  write_sweep(report, out);
  EXPECT_EQ(out.str().rfind("parameter,value,controller,seed", 0), 0u);
  EXPECT_NE(out.str().find("N,2,mpc,0,"), std::string::npos);
  EXPECT_THROW(sweep(cfg, "bogus", {"1"}, {ControllerKind::sadpq, ControllerKind::mpc}, {0}),
               ConfigError);
}

TEST(TraceIo, HeaderOnlyForEmptyRun) {
  SimConfig cfg = quiet(ControllerKind::gd, 0.0004);
  const SimTrace trace = run_closed_loop(cfg);
  EXPECT_TRUE(trace.records.empty());
  std::ostringstream out;
  write_trace(trace, out);
  EXPECT_EQ(out.str(),
            "t,x1,x2,y1,y2,u1,r,q_hat,bellman_err_final,a11,a12,a21,a22,b11,b21\n");
}

TEST(TraceIo, RoundTripIsExact) {
  SimConfig cfg = quiet(ControllerKind::sadpq, 0.2);
  cfg.sigma = 0.3;
  const SimTrace trace = run_closed_loop(cfg, 9);
  std::stringstream buf;
  write_trace(trace, buf);
  const SimTrace back = read_trace(buf);
  ASSERT_EQ(back.records.size(), trace.records.size());
  auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& a = trace.records[k];
    const auto& b = back.records[k];
    EXPECT_EQ(a.t, b.t);
    EXPECT_EQ(a.x_true, b.x_true);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.u, b.u);
    EXPECT_TRUE(same(a.r, b.r));
    EXPECT_TRUE(same(a.q_hat, b.q_hat));
    EXPECT_TRUE(same(a.bellman_err_final, b.bellman_err_final));
    EXPECT_EQ(a.vec_a, b.vec_a);
    EXPECT_EQ(a.vec_b, b.vec_b);
  }
  std::stringstream gd_buf;
  write_trace(run_closed_loop(quiet(ControllerKind::gd, 0.01)), gd_buf);
  EXPECT_TRUE(std::isnan(read_trace(gd_buf).records[0].bellman_err_final));
}

TEST(TraceIo, LineCountForThreeSeconds) {
  const fs::path dir = temp_dir();
  SimConfig cfg = quiet(ControllerKind::mpc, 3.0);
  write_trace(run_closed_loop(cfg), dir / "trace.csv");
  std::ifstream in(dir / "trace.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3001);
  EXPECT_THROW(write_trace(SimTrace{}, dir / "missing" / "x.csv"), TraceIoError);
  EXPECT_THROW(read_trace(dir / "missing.csv"), TraceIoError);
  fs::remove_all(dir);
}

TEST(Config, ParseFileText) {
  const SimConfig cfg = parse_config(R"(# case study, low noise
controller = mpc
sigma = 0.01   # trailing comment
x0 = 0.25, -1
seeds = 3, 4,5
T = 2
gradient_mode = direct
noise_wiring = kf_only
)");
  EXPECT_EQ(cfg.controller, ControllerKind::mpc);
  EXPECT_EQ(cfg.sigma, 0.01);
  EXPECT_EQ(cfg.x0, vec({0.25, -1}));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4, 5}));
  EXPECT_EQ(cfg.T, 2.0);
  EXPECT_EQ(cfg.gradient_mode, GradientMode::direct);
  EXPECT_EQ(cfg.noise_wiring, NoiseWiring::kf_only);
  EXPECT_EQ(cfg.step_count(), 2000);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("alpha 0.1"), ConfigError);
  EXPECT_THROW(parse_config("gamma = 0.9"), ConfigError);
  EXPECT_THROW(parse_config("alpha = fast"), ConfigError);
  EXPECT_THROW(parse_config("controller = lqr"), ConfigError);
  EXPECT_THROW(parse_config("plant = cartpole"), ConfigError);
  EXPECT_THROW(parse_config("L = 2.5"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/sadp.cfg"), ConfigError);
  EXPECT_THROW(validate(parse_config("dt = 0")), ConfigError);
  EXPECT_THROW(validate(parse_config("x0 = 1, 2, 3")), ConfigError);
  EXPECT_THROW(validate(parse_config("N = 0")), ConfigError);
  EXPECT_NO_THROW(validate(SimConfig{}));
}

TEST(Config, DefaultsAndDerivedNoise) {
  const SimConfig cfg;
  EXPECT_EQ(cfg.L, 10);
  EXPECT_EQ(cfg.N, 4);
  EXPECT_EQ(cfg.alpha, 0.1);
  EXPECT_EQ(cfg.beta, 1e-4);
  EXPECT_EQ(cfg.n_critic_iter, 20);
  EXPECT_EQ(cfg.effective_r_kf(), 1.0);
  SimConfig quiet_cfg;
  quiet_cfg.sigma = 0.0;
  EXPECT_EQ(quiet_cfg.effective_r_kf(), 1e-6);
  quiet_cfg.r_kf = 0.5;
  EXPECT_EQ(quiet_cfg.effective_r_kf(), 0.5);
}

TEST(Config, HashIsStableAndSensitive) {
  const SimConfig a;
  const SimConfig round_trip = parse_config(serialize(a));
  EXPECT_EQ(config_hash(a), config_hash(round_trip));
  SimConfig b = a;
  b.beta = 2e-4;
  EXPECT_NE(config_hash(a), config_hash(b));
  SimConfig c = a;
  c.seeds = {9};
  EXPECT_EQ(config_hash(a), config_hash(c));
}

TEST(Cli, ExitCodes) {
  const fs::path dir = temp_dir();
  const std::string out = (dir / "t.csv").string();
  EXPECT_EQ(cli("run --controller sadpq --seed 1 --T 0.05 --sigma 0.01 --out " + out), 0);
  EXPECT_TRUE(fs::exists(out));
  EXPECT_EQ(cli("run --controller sadpq --seed 1 --out " + out + " --alpha nope"), 1);
  EXPECT_EQ(cli("run --controller lqr --seed 1 --out " + out), 1);
  EXPECT_EQ(cli("run --seed 1 --out " + out), 1);
  EXPECT_EQ(cli("run --controller adpq --seed 1 --T 1 --beta 50 --out " + out), 2);
  EXPECT_EQ(cli("run --controller gd --seed 1 --T 0.01 --out " + (dir / "no" / "t.csv").string()), 3);

  {
    std::ofstream cfg(dir / "case.cfg");
    cfg << "sigma = 0.01\nT = 0.2\nseeds = 0, 1\n";
  }
  const std::string report = (dir / "report.csv").string();
  EXPECT_EQ(cli("compare --config " + (dir / "case.cfg").string() +
                " --controllers sadpq,gd --out " + report), 0);
  EXPECT_NE(slurp(report).find("sadpq,1,"), std::string::npos);
  EXPECT_EQ(cli("compare --controllers sadpq --T 0.1"), 1);
  EXPECT_EQ(cli("sweep --param beta --values 1e-4 2e-4 --controllers adpq,sadpq --T 0.1 --out " +
                report), 0);
  EXPECT_NE(slurp(report).find("beta,2e-4,adpq,0,"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path dir = temp_dir();
  {
    std::ofstream cfg(dir / "c.cfg");
    cfg << "T = 0.05\nsigma = 0.5\n";
  }
  const std::string a = (dir / "a.csv").string();
  const std::string b = (dir / "b.csv").string();
  ASSERT_EQ(cli("run --config " + (dir / "c.cfg").string() +
                " --sigma 0 --controller gd --seed 0 --out " + a), 0);
  SimConfig cfg = quiet(ControllerKind::gd);
  write_trace(run_closed_loop(cfg, 0), fs::path(b));
  EXPECT_EQ(slurp(a), slurp(b));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace sadp
