#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tiltvtol/geom.hpp"
#include "tiltvtol/plant.hpp"
#include "tiltvtol/reference.hpp"

namespace tiltvtol {

/// Feedback gains. Defaults are the values used for the tilted-quadrotor
/// reproduction runs.
struct Gains {
  double k1 = 1.2;
  double k2 = 0.34;
  double k3 = 12.8;
  double k4 = 10.0;
  double k_u = 16.0;
  double k_omega = 20.0;
  double k_integral = 1.0;  // k_I; zero disables the position integral
  double beta = 0.36;
  double eta = 6.0;
  double k_z = 4.0;
  double k_zdot = 4.0;
  double zddot_max = 0.5;
  double delta_z = 1.0;

  std::vector<std::string> violations() const;
  void validate() const;
  bool operator==(const Gains&) const = default;
};

/// Numerical guards around the singular configurations of the laws.
struct Thresholds {
  double min_force = 1e-3;            // eps_F, N
  double min_alignment = 1e-6;        // eps_u: require u . u_r > -1 + eps_u
  double antipodal_attitude = 1e-3;   // eps_theta, rad
  double omega_max = 50.0;            // clamp on the attitude command, rad/s
  double rate_filter_tau = 0.02;      // tau_f, s

  bool operator==(const Thresholds&) const = default;
};

/// How T_r-rate and u_r-rate are obtained.
enum class RateSource {
  kFiltered,  // first-order filtered finite differences
  kModel,     // chain rule through the known model and reference jerk
};

struct RateEstimate {
  double thrust_ref_rate = 0.0;            // dT_r/dt
  Vec3 dir_ref_rate = Vec3::Zero();        // d/dt u_r, inertial, orthogonal to u_r
};

struct ControllerState {
  Vec3 z = Vec3::Zero();      // bounded integral of the position error
  Vec3 z_dot = Vec3::Zero();

  bool has_previous = false;  // rate filter memory
  double thrust_ref_prev = 0.0;
  Vec3 dir_ref_prev = Vec3::Zero();
  RateEstimate rates;
};

struct PrimaryCommand {
  double thrust_bar = 0.0;           // T - F2
  double thrust = 0.0;               // T
  Vec3 tilt_rate_inertial = Vec3::Zero();  // omega^u_I, inertial coordinates
  double thrust_ref = 0.0;           // T_r
  UnitVec3 dir_ref;                  // u_r, inertial
  Vec3 velocity_error = Vec3::Zero();  // v~ (or v~_xi in position mode)
  RateEstimate rates;
  double lyapunov = 0.0;
  double lyapunov_rate = 0.0;
};

struct SecondaryCommand {
  Vec3 omega = Vec3::Zero();  // omega*, body coordinates
  bool near_antipodal = false;
  bool clamped = false;
};

struct TiltCommand {
  Vec3 tilt_rate = Vec3::Zero();           // u_dot, body
  Vec3 tilt_omega = Vec3::Zero();          // omega^u_B, body
  Vec3 omega = Vec3::Zero();               // final body angular velocity command
  Vec3 primary_tilt_omega = Vec3::Zero();  // omega^u_I rotated into body coordinates
  bool saturated = false;
};

/// sigma(y) = beta (beta^2 |y|^2 / eta^2 + 1)^(-1/2) y
Vec3 sigma(const Vec3& y, double beta, double eta);
Mat3 sigma_jacobian(const Vec3& y, double beta, double eta);

/// Second derivative of the bounded position integral for the current
/// (z, z_dot, position error).
Vec3 integrator_accel(const Vec3& z, const Vec3& z_dot, const Vec3& pos_error, const Gains& g);

/// Advance (z, z_dot) by dt holding the position error.
void advance_integrator(ControllerState& cs, const Vec3& pos_error, const Gains& g, double dt);

/// Filtered finite differences of (T_r, u_r). The first call returns zero
/// rates.
RateEstimate rate_estimates(ControllerState& cs, double thrust_ref, const UnitVec3& dir_ref,
                            double dt, double tau);

/// Reference velocity stabilization. With RateSource::kFiltered the filter
/// memory in `cs` is advanced by dt.
PrimaryCommand primary_velocity(const VehicleState& s, const ReferenceSample& ref,
                                const Environment& env, const VehicleParams& p, const Gains& g,
                                ControllerState& cs, double t, double dt,
                                RateSource rates = RateSource::kFiltered,
                                const Thresholds& th = {});

/// Reference position tracking with the bounded integrator; advances z.
PrimaryCommand primary_position(const VehicleState& s, const ReferenceSample& ref,
                                const Environment& env, const VehicleParams& p, const Gains& g,
                                ControllerState& cs, double t, double dt,
                                RateSource rates = RateSource::kFiltered,
                                const Thresholds& th = {});

/// Align body k with eta (inertial); lambda is the free spin about k.
SecondaryCommand secondary_direction(const VehicleState& s, const UnitVec3& eta, double lambda,
                                     const Gains& g, const Thresholds& th = {});

/// Stabilize the full attitude at `desired`.
SecondaryCommand secondary_attitude(const VehicleState& s, const Rotation& desired,
                                    const Gains& g, const Thresholds& th = {});

/// Saturated tilt law and angular-velocity composition. The primary
/// relation omega^u_I = omega^u_B + omega - u (u . omega) holds for the
/// returned commands whether or not the tilt limit is active.
TiltCommand tilt_and_omega(const VehicleState& s, const PrimaryCommand& primary,
                           const SecondaryCommand& secondary, const Gains& g,
                           const VehicleParams& p);

enum class InnerLoopMode {
  kFull,      // feedforward + parasitic pre-compensation
  kReduced,  // -k_w I (w - w*) + w x I w*
  kIdeal,     // no torque loop; the body rate is set to its command
};

Vec3 inner_torque(const VehicleState& s, const Vec3& omega_cmd,
                  const std::optional<Vec3>& omega_cmd_rate,
                  const std::optional<Vec3>& parasitic_estimate, const VehicleParams& p,
                  const Gains& g, InnerLoopMode mode);

}  // namespace tiltvtol
