#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tiltvtol/geom.hpp"

namespace tiltvtol {

/// Physical parameters of the vehicle. Inertial z points down, so gravity
/// is +g e_3 and hover thrust direction is u = (0, 0, 1).
struct VehicleParams {
  double mass = 1.5;                                      // kg
  Mat3 inertia = Eigen::Vector3d(0.028, 0.028, 0.06).asDiagonal();  // kg m^2
  double h = 0.05;        // pivot-plane offset along body k, m (signed)
  double d = 0.2;         // arm length, m
  double mu = 1e-5;       // rotor thrust coefficient, N s^2
  double kappa = 1e-6;    // rotor drag-torque coefficient, N m s^2
  double c_drag = 0.0092; // body drag, kg/m
  double c_induced = 0.025;  // induced drag, kg/s
  double delta = 0.5;     // sin of the maximal tilt angle
  double gravity = 9.81;  // m/s^2

  std::vector<std::string> violations() const;
  /// Throws Error(kInvalidConfig) listing every violated invariant.
  void validate() const;

  double max_tilt_angle() const;
  bool operator==(const VehicleParams&) const = default;
};

struct VehicleState {
  Vec3 position = Vec3::Zero();  // inertial, m
  Vec3 velocity = Vec3::Zero();  // inertial, m/s
  Rotation attitude;             // body -> inertial
  Vec3 omega = Vec3::Zero();     // body angular velocity, rad/s
  UnitVec3 thrust_dir;           // u in body coordinates

  Vec3 thrust_dir_inertial() const { return attitude * thrust_dir.vec(); }
  /// |u_{1,2}|, the sine of the tilt angle.
  double tilt_sine() const { return thrust_dir.vec().head<2>().norm(); }
};

/// Wind as a function of time; default is calm air.
struct Environment {
  std::function<Vec3(double)> wind;

  Vec3 wind_at(double t) const { return wind ? wind(t) : Vec3::Zero(); }
  static Environment constant_wind(const Vec3& w) {
    return Environment{[w](double) { return w; }};
  }
};

struct PlantInput {
  double thrust = 0.0;            // T, N
  Vec3 torque = Vec3::Zero();     // Gamma, body, N m
  Vec3 tilt_rate = Vec3::Zero();  // u_dot, body; only the first two
                                  // components drive the integration
};

struct AeroForce {
  Vec3 orientation_free = Vec3::Zero();  // F1
  double along_thrust = 0.0;             // F2 scalar, F2_vec = F2 u
};

struct StateDerivative {
  Vec3 position;  // x_dot
  Vec3 velocity;  // v_dot
  Vec3 omega;     // body angular velocity (attitude rate generator)
  Vec3 omega_dot;
  Vec3 thrust_dir;  // u_dot, body
};

/// How the rotational state evolves during a step.
enum class AttitudeModel {
  kDynamic,    // Euler equation driven by torque
  kKinematic,  // omega held at its current value (ideal inner loop)
};

AeroForce aero_force(const Vec3& velocity, const Vec3& thrust_dir_inertial,
                     const Environment& env, const VehicleParams& p, double t);

/// Moment of the thrust about the CoM from the pivot-plane offset:
/// (h e_3) x (-T u), body coordinates.
Vec3 parasitic_torque(const VehicleState& s, const PlantInput& in, const VehicleParams& p);

StateDerivative derivative(const VehicleState& s, const PlantInput& in, const Environment& env,
                           const VehicleParams& p, double t,
                           AttitudeModel model = AttitudeModel::kDynamic);

inline constexpr double kMaxStep = 0.02;

/// One RK4 step. Attitude is advanced on SO(3) through a local rotation
/// vector (Munthe-Kaas form); u_{1,2} moves linearly with the held tilt
/// rate and u_3 is rebuilt on the unit sphere. Throws
/// Error(kIntegrationFailure) when the result violates state invariants.
VehicleState step(const VehicleState& s, const PlantInput& in, const Environment& env,
                  const VehicleParams& p, double t, double dt,
                  AttitudeModel model = AttitudeModel::kDynamic);

}  // namespace tiltvtol
