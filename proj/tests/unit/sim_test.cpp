#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "tiltvtol/sim.hpp"

namespace tiltvtol {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tiltvtol_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioConfig short_run(double duration = 2.0) {
  ScenarioConfig c = figure_eight_slow();
  c.duration = duration;
  return c;
}

std::string csv_text(const TelemetryLog& log, int decimate = 1) {
  std::ostringstream os;
  write_csv(log, os, decimate);
  return os.str();
}

// ---- metrics ----------------------------------------------------------------

TEST(Metrics, EmptyLogIsAnError) {
  try {
    compute_metrics({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLog);
    EXPECT_STREQ(e.what(), "empty log");
  }
}

TEST(Metrics, TwoRowsByHand) {
  TelemetryLog log(2);
  log[0].t = 5.0;
  log[0].position_error = Vec3(3, 4, 0);  // |e| = 5
  log[0].velocity = Vec3(1, 0, 7);        // ground speed 1
  log[0].tilt_deg = 10.0;
  log[0].saturated = true;
  log[1].t = 6.0;
  log[1].position_error = Vec3(0, 0, 1);  // |e| = 1
  log[1].velocity = Vec3(0, 3, 0);
  log[1].inclination_deg = 2.0;
  const Metrics m = compute_metrics(log, 5.0);
  EXPECT_EQ(m.rows, 2u);
  EXPECT_DOUBLE_EQ(m.rms_position_error, std::sqrt((25.0 + 1.0) / 2.0));
  EXPECT_DOUBLE_EQ(m.final_position_error, 1.0);
  EXPECT_DOUBLE_EQ(m.max_position_error_steady, 5.0);
  EXPECT_DOUBLE_EQ(m.max_tilt_deg, 10.0);
  EXPECT_DOUBLE_EQ(m.max_inclination_deg, 2.0);
  EXPECT_DOUBLE_EQ(m.saturation_duty_cycle, 0.5);
  EXPECT_DOUBLE_EQ(m.mean_ground_speed, 2.0);
}

TEST(Metrics, TransientWindowExcludesEarlyRows) {
  TelemetryLog log(2);
  log[0].t = 0.0;
  log[0].position_error = Vec3(100, 0, 0);
  log[1].t = 5.0;
  log[1].position_error = Vec3(0, 2, 0);
  EXPECT_DOUBLE_EQ(compute_metrics(log, 5.0).rms_position_error, 2.0);
  EXPECT_TRUE(std::isnan(compute_metrics(log, 10.0).rms_position_error));
}

// ---- CSV --------------------------------------------------------------------

TEST(Csv, HeaderFollowsRowLayout) {
  const std::string h = csv_header();
  EXPECT_EQ(h.rfind("t,x_1,x_2,x_3,x_ref_1", 0), 0u);
  EXPECT_NE(h.find("tilt_deg,inclination_deg,thrust,torque_1"), std::string::npos);
  EXPECT_NE(h.find("rotor_speed_sq_4,lyapunov,lyapunov_rate,saturated,feasible"), std::string::npos);
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), 29);
}

TEST(Csv, RowsParseBackAndUseDotDecimal) {
  TelemetryLog log(3);
  for (int i = 0; i < 3; ++i) {
    log[i].t = 0.001 * i;
    log[i].position = Vec3(1.5, -2.25, 1e-7 * i);
    log[i].thrust = 14.715;
    log[i].rotor_speed_sq = Vec4(1e5, 2e5, 3e5, 4e5);
    log[i].saturated = (i == 1);
  }
  std::istringstream in(csv_text(log));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, csv_header());
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 29);
    std::istringstream fields(line);
    std::string f;
    std::vector<double> values;
    while (std::getline(fields, f, ',')) values.push_back(std::stod(f));
    EXPECT_DOUBLE_EQ(values[0], log[rows].t);
    EXPECT_DOUBLE_EQ(values[2], -2.25);
    EXPECT_DOUBLE_EQ(values[18], 14.715);
    EXPECT_EQ(values[28], rows == 1 ? 1.0 : 0.0);
    EXPECT_EQ(values[29], 1.0);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Csv, DecimationKeepsEveryNthRow) {
  TelemetryLog log(10);
  for (int i = 0; i < 10; ++i) log[i].t = i;
  const std::string text = csv_text(log, 4);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3);  // rows 0, 4, 8
}

TEST(Csv, UnwritablePathReportsPath) {
  try {
    write_csv(TelemetryLog(1), fs::path("/nonexistent-dir/x.csv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
}

// ---- config -----------------------------------------------------------------

TEST(Config, RoundTripsThroughFile) {
  const fs::path dir = scratch_dir("config");
  ScenarioConfig c = figure_eight_fast();
  c.name = "round trip";
  c.rotor_limits.max_speed_sq = 7.5e5;
  c.wind = Vec3(1.25, -0.5, 0.0);
  c.initial.attitude = Rotation::about_axis(Vec3(1, 2, 3), 0.3).matrix();
  c.secondary = SecondaryMode::kDirection;
  c.secondary_target.direction = Vec3(0, 0.6, 0.8);
  c.seed = 1234567890123ull;
  save_config(c, dir / "c.json");
  EXPECT_EQ(load_config(dir / "c.json"), c);
  EXPECT_EQ(parse_config(dump_config(ScenarioConfig{})), ScenarioConfig{});
}

TEST(Config, EmptyDocumentGivesDefaults) {
  EXPECT_EQ(parse_config("{}"), ScenarioConfig{});
}

TEST(Config, UnknownKeysAndAllViolationsReported) {
  const char* text = R"({
    "name": "bad",
    "dt": 0.5,
    "duration": -1,
    "gains": {"k1": -1, "kk2": 3},
    "vehicle": {"mass": "heavy"},
    "primary": "sideways",
    "bogus": true
  })";
  try {
    parse_config(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
    const std::string w = e.what();
    for (const char* needle : {"gains.kk2: unknown key", "bogus: unknown key", "vehicle.mass",
                               "primary: expected one of", "dt must", "duration must", "k1 must"}) {
      EXPECT_NE(w.find(needle), std::string::npos) << needle << "\n" << w;
    }
  }
}

TEST(Config, MalformedJsonIsInvalidConfig) {
  try {
    parse_config("{ not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
}

TEST(Config, MissingFileIsIoError) {
  try {
    load_config("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Config, OverrideByDottedKey) {
  const ScenarioConfig base = figure_eight_slow();
  const ScenarioConfig c = with_override(base, "gains.k1", "2.5");
  EXPECT_EQ(c.gains.k1, 2.5);
  ScenarioConfig expected = base;
  expected.gains.k1 = 2.5;
  EXPECT_EQ(c, expected);
  EXPECT_EQ(with_override(base, "inner_loop", "\"full\"").inner_loop, InnerLoopMode::kFull);
  EXPECT_THROW(with_override(base, "gains.nope", "1"), Error);
  EXPECT_THROW(with_override(base, "gains.k1", "-1"), Error);
}

TEST(Config, TiltBoundNeedsSmallEnoughStep) {
  ScenarioConfig c;
  c.dt = 0.02;  // k_u dt = 0.32 is fine
  EXPECT_NO_THROW(c.validate());
  c.control_decimation = 4;  // 1.28 > 1
  EXPECT_THROW(c.validate(), Error);
}

// ---- run --------------------------------------------------------------------

TEST(Run, ZeroGravityHoverHasNoThrustReference) {
  ScenarioConfig c;
  c.vehicle.gravity = 0.0;
  c.vehicle.c_drag = c.vehicle.c_induced = 0.0;
  c.trajectory.kind = TrajectoryKind::kHover;
  c.initial.position = Vec3::Zero();
  c.initial.velocity = Vec3::Zero();
  c.duration = 1.0;
  try {
    run(c);
    FAIL();
  } catch (const SimulationFailure& f) {
    EXPECT_EQ(f.code(), ErrorCode::kSingularThrust);
    EXPECT_EQ(f.time(), 0.0);
    EXPECT_TRUE(f.partial_log().empty());
  }
}

TEST(Run, HoverAtTargetStaysPut) {
  ScenarioConfig c;
  c.trajectory.kind = TrajectoryKind::kHover;
  c.trajectory.position = Vec3(1, 2, -3);
  c.initial.position = c.trajectory.position;
  c.initial.velocity = Vec3::Zero();
  c.duration = 5.0;
  c.transient = 0.0;
  const RunResult r = run(c);
  EXPECT_LT(r.metrics.max_position_error_steady, 1e-9);
  EXPECT_LT(r.metrics.max_inclination_deg, 1e-9);
  EXPECT_NEAR(r.log.back().thrust, c.vehicle.mass * c.vehicle.gravity, 1e-9);
  EXPECT_TRUE(r.log.back().feasible);
}

TEST(Run, DeterministicCsv) {
  ScenarioConfig c = short_run();
  c.initial.position_jitter = 0.2;
  c.seed = 99;
  EXPECT_EQ(csv_text(run(c).log), csv_text(run(c).log));
  ScenarioConfig other = c;
  other.seed = 100;
  EXPECT_NE(csv_text(run(c).log), csv_text(run(other).log));
}

TEST(Run, OneRowPerStepWithLoggedTimes) {
  const RunResult r = run(short_run(0.5));
  ASSERT_EQ(r.log.size(), 500u);
  EXPECT_EQ(r.log.front().t, 0.0);
  EXPECT_DOUBLE_EQ(r.log.back().t, 0.499);
  EXPECT_EQ(r.diagnostics.control_steps, 500u);
}

TEST(Run, ControlDecimationHoldsCommands) {
  ScenarioConfig c = short_run(0.5);
  c.control_decimation = 5;
  const RunResult r = run(c);
  EXPECT_EQ(r.diagnostics.control_steps, 100u);
  EXPECT_EQ(r.log[1].thrust == r.log[2].thrust, true);
}

TEST(Run, InvalidConfigThrowsBeforeRunning) {
  ScenarioConfig c;
  c.duration = 0.0;
  EXPECT_THROW(run(c), Error);
}

TEST(Run, TiltAndIntegratorBoundsOnReferenceRuns) {
  for (const ScenarioConfig& c : {figure_eight_slow(), figure_eight_fast()}) {
    const RunResult r = run(c);
    const double bound = std::asin(c.vehicle.delta) * 180.0 / std::numbers::pi + 1e-7 * 180.0 / std::numbers::pi;
    for (const auto& row : r.log) ASSERT_LE(row.tilt_deg, bound) << c.name << " t=" << row.t;
    EXPECT_LE(r.diagnostics.max_integrator_norm, c.gains.delta_z + 1.0) << c.name;
    EXPECT_LE(r.diagnostics.max_unit_norm_error, 1e-9) << c.name;
    EXPECT_LE(r.diagnostics.max_identity_residual, 1e-12) << c.name;
  }
}

TEST(Run, HalvingStepBarelyMovesFinalPosition) {
  ScenarioConfig a = figure_eight_slow();
  ScenarioConfig b = a;
  b.dt = a.dt / 2;
  const TelemetryLog la = run(a).log;
  const TelemetryLog lb = run(b).log;
  // same instant: row n at dt is row 2n at dt / 2
  const std::size_t n = la.size() - 1;
  ASSERT_DOUBLE_EQ(la[n].t, lb[2 * n].t);
  const double gap = (la[n].position - lb[2 * n].position).norm();
  EXPECT_LT(gap, 1e-5) << gap;
}

TEST(Run, SampledControlConvergesAtFirstOrder) {
  // commands are held over each step, so the final-position gap halves with dt
  auto gap = [](double dt) {
    ScenarioConfig a = figure_eight_slow();
    a.duration = 10.0;
    a.dt = dt;
    ScenarioConfig b = a;
    b.dt = dt / 2;
    const TelemetryLog la = run(a).log;
    const TelemetryLog lb = run(b).log;
    const std::size_t n = la.size() - 1;
    return (la[n].position - lb[2 * n].position).norm();
  };
  const double ratio = gap(1e-3) / gap(5e-4);
  EXPECT_NEAR(ratio, 2.0, 0.2);
}

TEST(Run, MetricsJsonHasAllFields) {
  const RunResult r = run(short_run(1.0));
  const std::string j = metrics_json(r.metrics, r.diagnostics);
  for (const char* k : {"rms_position_error", "max_tilt_deg", "saturation_duty_cycle",
                        "max_identity_residual", "mean_ground_speed"}) {
    EXPECT_NE(j.find(k), std::string::npos) << k;
  }
}

}  // namespace
}  // namespace tiltvtol
