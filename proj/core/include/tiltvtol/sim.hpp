#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tiltvtol/errors.hpp"
#include "tiltvtol/scenario.hpp"

namespace tiltvtol {

/// One logged control step. CSV columns follow member order.
struct TelemetryRow {
  double t = 0.0;
  Vec3 position, position_ref, position_error;
  Vec3 velocity, velocity_error;
  double tilt_deg = 0.0;         // asin |u_{1,2}|
  double inclination_deg = 0.0;  // angle(body k, inertial vertical)
  double thrust = 0.0;
  Vec3 torque;
  Vec4 rotor_speed_sq;
  double lyapunov = 0.0;
  double lyapunov_rate = 0.0;
  bool saturated = false;
  bool feasible = true;
};

using TelemetryLog = std::vector<TelemetryRow>;

/// Per-step checks that are not part of the CSV.
struct RunDiagnostics {
  double max_identity_residual = 0.0;  // |w^u_I - (w^u_B + w - u(u.w))|, body
  double max_unit_norm_error = 0.0;    // ||u| - 1|
  double max_tilt_sine = 0.0;
  double max_integrator_norm = 0.0;    // |z|
  std::size_t control_steps = 0;
  std::size_t infeasible_steps = 0;
};

struct Metrics {
  std::size_t rows = 0;
  double max_tilt_deg = 0.0;
  double max_inclination_deg = 0.0;
  double max_inclination_steady_deg = 0.0;
  double rms_position_error = 0.0;     // over t >= transient
  double max_position_error_steady = 0.0;
  double final_position_error = 0.0;
  double saturation_duty_cycle = 0.0;  // fraction of rows with the tilt limit active
  double mean_ground_speed = 0.0;      // horizontal speed, over t >= transient
};

struct RunResult {
  TelemetryLog log;
  Metrics metrics;
  RunDiagnostics diagnostics;
};

/// Thrown by run() when a controller or plant error aborts the loop. Holds
/// the rows logged up to the failure.
class SimulationFailure : public Error {
 public:
  SimulationFailure(const Error& cause, double t, TelemetryLog partial);

  double time() const { return time_; }
  const TelemetryLog& partial_log() const { return partial_; }

 private:
  double time_;
  TelemetryLog partial_;
};

/// reference -> primary -> secondary -> tilt/omega -> inner torque ->
/// allocation -> plant, at a fixed step.
RunResult run(const ScenarioConfig& config);

/// Throws Error(kEmptyLog) for an empty log; steady-state fields are NaN
/// when no row reaches the transient time.
Metrics compute_metrics(const TelemetryLog& log, double transient = 5.0);

std::string csv_header();
void write_csv(const TelemetryLog& log, std::ostream& out, int decimate = 1);
void write_csv(const TelemetryLog& log, const std::filesystem::path& path, int decimate = 1);

std::string metrics_json(const Metrics& m, const RunDiagnostics& d);

/// Config files are JSON with the member names of ScenarioConfig. Unknown
/// keys and all validation failures are reported together.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(std::string_view json_text);
std::string dump_config(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

/// Replace the value at a dotted key path (e.g. "gains.k1") in a config
/// document and parse the result.
ScenarioConfig with_override(const ScenarioConfig& base, std::string_view dotted_key,
                             std::string_view json_value);

}  // namespace tiltvtol
