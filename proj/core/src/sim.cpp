#include "tiltvtol/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "tiltvtol/allocation.hpp"
#include "tiltvtol/controller.hpp"
#include "tiltvtol/plant.hpp"

namespace tiltvtol {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double inclination_deg(const Rotation& r) {
  const double c = std::clamp(r.col(2).z(), -1.0, 1.0);
  return std::acos(c) * kRadToDeg;
}

std::string with_time(const Error& cause, double t) {
  std::ostringstream os;
  os << "simulation aborted at t=" << t << " s [" << to_string(cause.code()) << "]: " << cause.what();
  return os.str();
}

}  // namespace

SimulationFailure::SimulationFailure(const Error& cause, double t, TelemetryLog partial)
    : Error(cause.code(), with_time(cause, t)), time_(t), partial_(std::move(partial)) {}

RunResult run(const ScenarioConfig& config) {
  config.validate();

  const VehicleParams& p = config.vehicle;
  const Gains& g = config.gains;
  const Environment env = Environment::constant_wind(config.wind);
  const Trajectory trajectory = config.trajectory.make();
  const AttitudeModel attitude_model = config.inner_loop == InnerLoopMode::kIdeal
                                           ? AttitudeModel::kKinematic
                                           : AttitudeModel::kDynamic;
  const Rotation desired_attitude = Rotation::orthonormalized(config.secondary_target.attitude);
  const UnitVec3 desired_direction = UnitVec3::normalized(config.secondary_target.direction);
  const double control_dt = config.dt * config.control_decimation;

  const auto steps = static_cast<std::size_t>(std::llround(config.duration / config.dt));

  RunResult result;
  result.log.reserve(steps);
  RunDiagnostics& diag = result.diagnostics;

  VehicleState state = config.initial_state();
  ControllerState cs;
  PrimaryCommand primary;
  SecondaryCommand secondary;
  TiltCommand tilt;
  std::optional<Vec3> prev_omega_cmd;
  Vec3 omega_cmd_rate = Vec3::Zero();

  double t = 0.0;
  try {
    for (std::size_t n = 0; n < steps; ++n) {
      t = static_cast<double>(n) * config.dt;
      const ReferenceSample ref = trajectory(t);

      if (n % static_cast<std::size_t>(config.control_decimation) == 0) {
        primary = config.primary == PrimaryMode::kPosition
                      ? primary_position(state, ref, env, p, g, cs, t, control_dt, config.rates,
                                         config.thresholds)
                      : primary_velocity(state, ref, env, p, g, cs, t, control_dt, config.rates,
                                         config.thresholds);
        secondary = config.secondary == SecondaryMode::kAttitude
                        ? secondary_attitude(state, desired_attitude, g, config.thresholds)
                        : secondary_direction(state, desired_direction,
                                              config.secondary_target.spin, g, config.thresholds);
        tilt = tilt_and_omega(state, primary, secondary, g, p);

        const Vec3& u = state.thrust_dir.vec();
        const Vec3 rebuilt = tilt.tilt_omega + tilt.omega - u * u.dot(tilt.omega);
        diag.max_identity_residual =
            std::max(diag.max_identity_residual, (tilt.primary_tilt_omega - rebuilt).norm());
        diag.max_integrator_norm = std::max(diag.max_integrator_norm, cs.z.norm());
        ++diag.control_steps;

        omega_cmd_rate = prev_omega_cmd ? Vec3((tilt.omega - *prev_omega_cmd) / control_dt)
                                        : Vec3(Vec3::Zero());
        prev_omega_cmd = tilt.omega;
      }

      PlantInput input;
      input.tilt_rate = tilt.tilt_rate;
      RotorCommand rotors;
      if (config.inner_loop == InnerLoopMode::kIdeal) {
        // body rate follows its command exactly; no actuator mapping
        state.omega = tilt.omega;
        input.thrust = primary.thrust;
        rotors.feasible = true;
        rotors.speed_sq.setConstant(std::numeric_limits<double>::quiet_NaN());
      } else {
        PlantInput nominal;
        nominal.thrust = primary.thrust;
        const Vec3 torque = inner_torque(
            state, tilt.omega, omega_cmd_rate,
            config.inner_loop == InnerLoopMode::kFull
                ? std::optional<Vec3>(parasitic_torque(state, nominal, p))
                : std::nullopt,
            p, g, config.inner_loop);
        rotors = allocate(Wrench{primary.thrust, torque}, state.thrust_dir, p, config.rotor_limits);
        input.thrust = rotors.achieved.thrust;
        input.torque = rotors.achieved.torque;
        if (!rotors.feasible) ++diag.infeasible_steps;
      }

      TelemetryRow row;
      row.t = t;
      row.position = state.position;
      row.position_ref = ref.position;
      row.position_error = state.position - ref.position;
      row.velocity = state.velocity;
      row.velocity_error = state.velocity - ref.velocity;
      row.tilt_deg = std::asin(std::min(1.0, state.tilt_sine())) * kRadToDeg;
      row.inclination_deg = inclination_deg(state.attitude);
      row.thrust = input.thrust;
      row.torque = input.torque;
      row.rotor_speed_sq = rotors.speed_sq;
      row.lyapunov = primary.lyapunov;
      row.lyapunov_rate = primary.lyapunov_rate;
      row.saturated = tilt.saturated;
      row.feasible = rotors.feasible;
      result.log.push_back(row);

      state = step(state, input, env, p, t, config.dt, attitude_model);
      diag.max_unit_norm_error =
          std::max(diag.max_unit_norm_error, std::abs(state.thrust_dir.vec().norm() - 1.0));
      diag.max_tilt_sine = std::max(diag.max_tilt_sine, state.tilt_sine());
    }
  } catch (const Error& e) {
    throw SimulationFailure(e, t, std::move(result.log));
  }

  result.metrics = compute_metrics(result.log, config.transient);
  return result;
}

Metrics compute_metrics(const TelemetryLog& log, double transient) {
  if (log.empty()) throw Error(ErrorCode::kEmptyLog, "empty log");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  Metrics m;
  m.rows = log.size();
  std::size_t steady = 0, saturated = 0;
  double sq_sum = 0.0, speed_sum = 0.0;
  for (const auto& r : log) {
    m.max_tilt_deg = std::max(m.max_tilt_deg, r.tilt_deg);
    m.max_inclination_deg = std::max(m.max_inclination_deg, r.inclination_deg);
    if (r.saturated) ++saturated;
    if (r.t >= transient) {
      const double e = r.position_error.norm();
      ++steady;
      sq_sum += e * e;
      speed_sum += r.velocity.head<2>().norm();
      m.max_position_error_steady = std::max(m.max_position_error_steady, e);
      m.max_inclination_steady_deg = std::max(m.max_inclination_steady_deg, r.inclination_deg);
    }
  }
  m.final_position_error = log.back().position_error.norm();
  m.saturation_duty_cycle = static_cast<double>(saturated) / static_cast<double>(log.size());
  if (steady > 0) {
    m.rms_position_error = std::sqrt(sq_sum / static_cast<double>(steady));
    m.mean_ground_speed = speed_sum / static_cast<double>(steady);
  } else {
    m.rms_position_error = m.mean_ground_speed = nan;
    m.max_position_error_steady = m.max_inclination_steady_deg = nan;
  }
  return m;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

template <typename V>
void put_all(std::ostream& out, const V& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out << ',';
    put(out, v[i]);
  }
}

}  // namespace

std::string csv_header() {
  std::string h = "t";
  auto add3 = [&](const char* base) {
    for (int i = 1; i <= 3; ++i) h += std::string(",") + base + "_" + std::to_string(i);
  };
  add3("x");
  add3("x_ref");
  add3("x_err");
  add3("v");
  add3("v_err");
  h += ",tilt_deg,inclination_deg,thrust";
  add3("torque");
  for (int i = 1; i <= 4; ++i) h += ",rotor_speed_sq_" + std::to_string(i);
  h += ",lyapunov,lyapunov_rate,saturated,feasible";
  return h;
}

void write_csv(const TelemetryLog& log, std::ostream& out, int decimate) {
  if (decimate < 1) decimate = 1;
  out << csv_header() << '\n';
  for (std::size_t i = 0; i < log.size(); i += static_cast<std::size_t>(decimate)) {
    const TelemetryRow& r = log[i];
    put(out, r.t);
    put_all(out, r.position);
    put_all(out, r.position_ref);
    put_all(out, r.position_error);
    put_all(out, r.velocity);
    put_all(out, r.velocity_error);
    out << ',';
    put(out, r.tilt_deg);
    out << ',';
    put(out, r.inclination_deg);
    out << ',';
    put(out, r.thrust);
    put_all(out, r.torque);
    put_all(out, r.rotor_speed_sq);
    out << ',';
    put(out, r.lyapunov);
    out << ',';
    put(out, r.lyapunov_rate);
    out << ',' << (r.saturated ? 1 : 0) << ',' << (r.feasible ? 1 : 0) << '\n';
  }
}

void write_csv(const TelemetryLog& log, const std::filesystem::path& path, int decimate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_csv(log, out, decimate);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace tiltvtol
