#include "tiltvtol/scenario.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tiltvtol/errors.hpp"

namespace tiltvtol {

Trajectory TrajectoryConfig::make() const {
  switch (kind) {
    case TrajectoryKind::kLissajous:
      return [w = frequency, a = amplitude](double t) { return lissajous(t, w, a); };
    case TrajectoryKind::kHover:
      return [x = position](double t) { return hover(t, x); };
    case TrajectoryKind::kConstantVelocity:
      return [v = velocity](double t) { return constant_velocity(t, v); };
  }
  throw std::logic_error("unknown trajectory kind");
}

void ScenarioConfig::validate() const {
  std::vector<std::string> bad;
  for (const auto& v : vehicle.violations()) bad.push_back("vehicle: " + v);
  for (const auto& v : gains.violations()) bad.push_back("gains: " + v);

  if (!(duration > 0.0)) bad.push_back("duration must be > 0");
  if (!(dt > 0.0 && dt <= kMaxStep)) bad.push_back("dt must lie in (0, 0.02]");
  if (control_decimation < 1) bad.push_back("control_decimation must be >= 1");
  if (csv_decimate < 1) bad.push_back("csv_decimate must be >= 1");
  if (control_decimation >= 1 && gains.k_u * dt * control_decimation > 1.0) {
    bad.push_back("k_u * dt * control_decimation must be <= 1 for the tilt bound to hold");
  }
  if (!(transient >= 0.0)) bad.push_back("transient must be >= 0");
  if (!wind.allFinite()) bad.push_back("wind must be finite");
  if (trajectory.kind == TrajectoryKind::kLissajous && !(trajectory.frequency > 0.0)) {
    bad.push_back("trajectory.frequency must be > 0");
  }
  if (rotor_limits.max_speed_sq && !(*rotor_limits.max_speed_sq > 0.0)) {
    bad.push_back("rotor_limits.max_speed_sq must be > 0");
  }
  if (!(thresholds.min_force > 0.0)) bad.push_back("thresholds.min_force must be > 0");
  if (!(thresholds.min_alignment > 0.0 && thresholds.min_alignment < 2.0)) {
    bad.push_back("thresholds.min_alignment must lie in (0, 2)");
  }
  if (!(thresholds.omega_max > 0.0)) bad.push_back("thresholds.omega_max must be > 0");
  if (!(thresholds.rate_filter_tau >= 0.0)) bad.push_back("thresholds.rate_filter_tau must be >= 0");
  if (!(initial.position_jitter >= 0.0)) bad.push_back("initial_state.position_jitter must be >= 0");

  const Vec3& u = initial.thrust_dir;
  if (std::abs(u.norm() - 1.0) > UnitVec3::kDriftTolerance) {
    bad.push_back("initial_state.thrust_dir must be a unit vector");
  } else if (!(u.z() > 0.0) || u.head<2>().norm() > vehicle.delta + 1e-9) {
    bad.push_back("initial_state.thrust_dir must satisfy u_3 > 0 and |u_{1,2}| <= delta");
  }
  try {
    Rotation r(initial.attitude);
  } catch (const std::invalid_argument&) {
    bad.push_back("initial_state.attitude must be a rotation matrix");
  }
  if (secondary == SecondaryMode::kAttitude) {
    try {
      Rotation r(secondary_target.attitude);
    } catch (const std::invalid_argument&) {
      bad.push_back("secondary.attitude must be a rotation matrix");
    }
  } else if (std::abs(secondary_target.direction.norm() - 1.0) > UnitVec3::kDriftTolerance) {
    bad.push_back("secondary.direction must be a unit vector");
  }

  if (!bad.empty()) {
    std::ostringstream os;
    os << "invalid scenario '" << name << "' (" << bad.size() << " problems):";
    for (const auto& b : bad) os << "\n  " << b;
    throw Error(ErrorCode::kInvalidConfig, os.str());
  }
}

VehicleState ScenarioConfig::initial_state() const {
  VehicleState s;
  s.position = initial.position;
  if (initial.position_jitter > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-initial.position_jitter, initial.position_jitter);
    for (int i = 0; i < 3; ++i) s.position[i] += jitter(rng);
  }
  s.velocity = initial.velocity;
  s.attitude = Rotation::orthonormalized(initial.attitude);
  s.omega = initial.omega;
  s.thrust_dir = UnitVec3(initial.thrust_dir);
  return s;
}

namespace {

ScenarioConfig figure_eight(double frequency, std::string name) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.vehicle = VehicleParams{};
  c.vehicle.delta = std::sin(std::numbers::pi / 6.0);
  c.gains = Gains{};
  c.trajectory.kind = TrajectoryKind::kLissajous;
  c.trajectory.frequency = frequency;
  c.trajectory.amplitude = 5.0;
  c.initial.position = Vec3(0.0, 0.5, 0.0);
  c.initial.velocity = Vec3(5.0 * frequency, 10.0 * frequency, 0.0);
  c.initial.attitude = Mat3::Identity();
  c.initial.omega = Vec3::Zero();
  c.initial.thrust_dir = Vec3(0.0, 0.0, 1.0);
  c.duration = 30.0;
  c.dt = 1e-3;
  return c;
}

}  // namespace

ScenarioConfig figure_eight_slow() {
  return figure_eight(2.0 * std::numbers::pi / 15.0, "figure-eight-slow");
}

ScenarioConfig figure_eight_fast() {
  return figure_eight(std::numbers::pi / 5.0, "figure-eight-fast");
}

std::string_view to_string(PrimaryMode m) {
  return m == PrimaryMode::kVelocity ? "velocity" : "position";
}

std::string_view to_string(SecondaryMode m) {
  return m == SecondaryMode::kDirection ? "direction" : "attitude";
}

std::string_view to_string(InnerLoopMode m) {
  switch (m) {
    case InnerLoopMode::kFull: return "full";
    case InnerLoopMode::kReduced: return "reduced";
    case InnerLoopMode::kIdeal: return "ideal";
  }
  return "?";
}

std::string_view to_string(RateSource r) {
  return r == RateSource::kFiltered ? "filtered" : "model";
}

std::string_view to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kLissajous: return "lissajous";
    case TrajectoryKind::kHover: return "hover";
    case TrajectoryKind::kConstantVelocity: return "constant_velocity";
  }
  return "?";
}

}  // namespace tiltvtol
