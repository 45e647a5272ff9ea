#pragma once

#include <cstdint>
#include <numbers>
#include <string>

#include "tiltvtol/allocation.hpp"
#include "tiltvtol/controller.hpp"
#include "tiltvtol/geom.hpp"
#include "tiltvtol/plant.hpp"
#include "tiltvtol/reference.hpp"

namespace tiltvtol {

enum class PrimaryMode { kVelocity, kPosition };
enum class SecondaryMode { kDirection, kAttitude };
enum class TrajectoryKind { kLissajous, kHover, kConstantVelocity };

struct TrajectoryConfig {
  TrajectoryKind kind = TrajectoryKind::kLissajous;
  double frequency = 2.0 * std::numbers::pi / 15.0;  // rad/s
  double amplitude = 5.0;                            // m
  Vec3 position = Vec3::Zero();                      // hover point
  Vec3 velocity = Vec3::Zero();                      // constant-velocity reference

  Trajectory make() const;
  bool operator==(const TrajectoryConfig&) const = default;
};

struct InitialState {
  Vec3 position = Vec3(0.0, 0.5, 0.0);
  Vec3 velocity = Vec3(5.0, 10.0, 0.0) * (2.0 * std::numbers::pi / 15.0);
  Mat3 attitude = Mat3::Identity();
  Vec3 omega = Vec3::Zero();
  Vec3 thrust_dir = Vec3(0.0, 0.0, 1.0);  // body coordinates
  double position_jitter = 0.0;  // uniform +/- jitter per axis, seeded

  bool operator==(const InitialState&) const = default;
};

struct SecondaryTarget {
  Vec3 direction = Vec3(0.0, 0.0, 1.0);  // eta, inertial (direction mode)
  double spin = 0.0;                     // lambda (direction mode)
  Mat3 attitude = Mat3::Identity();      // R_d (attitude mode)

  bool operator==(const SecondaryTarget&) const = default;
};

/// Everything needed to reproduce one run. Defaults reproduce the slow
/// figure-eight run.
struct ScenarioConfig {
  std::string name = "scenario";
  VehicleParams vehicle;
  Gains gains;
  Thresholds thresholds;
  PrimaryMode primary = PrimaryMode::kPosition;
  SecondaryMode secondary = SecondaryMode::kAttitude;
  InnerLoopMode inner_loop = InnerLoopMode::kReduced;
  RateSource rates = RateSource::kFiltered;
  SecondaryTarget secondary_target;
  TrajectoryConfig trajectory;
  InitialState initial;
  double duration = 30.0;      // s
  double dt = 1e-3;            // s
  int control_decimation = 1;  // plant steps per control update
  int csv_decimate = 1;
  double transient = 5.0;      // s discarded by steady-state metrics
  Vec3 wind = Vec3::Zero();
  RotorLimits rotor_limits;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  /// Throws Error(kInvalidConfig) listing all violations.
  void validate() const;
  VehicleState initial_state() const;
  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig figure_eight_slow();
ScenarioConfig figure_eight_fast();

std::string_view to_string(PrimaryMode m);
std::string_view to_string(SecondaryMode m);
std::string_view to_string(InnerLoopMode m);
std::string_view to_string(RateSource r);
std::string_view to_string(TrajectoryKind k);

}  // namespace tiltvtol
