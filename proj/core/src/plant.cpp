#include "tiltvtol/plant.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tiltvtol/errors.hpp"

namespace tiltvtol {

std::vector<std::string> VehicleParams::violations() const {
  std::vector<std::string> bad;
  if (!(mass > 0.0)) bad.push_back("mass must be > 0");
  if (!inertia.allFinite() || !inertia.isApprox(inertia.transpose(), 1e-12)) {
    bad.push_back("inertia must be finite and symmetric");
  } else {
    Eigen::SelfAdjointEigenSolver<Mat3> es(inertia, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0)) bad.push_back("inertia must be positive definite");
  }
  if (!std::isfinite(h)) bad.push_back("h must be finite");
  if (!(d > 0.0)) bad.push_back("d must be > 0");
  if (!(mu > 0.0)) bad.push_back("mu must be > 0");
  if (!(kappa > 0.0)) bad.push_back("kappa must be > 0");
  if (!(c_drag >= 0.0)) bad.push_back("c_drag must be >= 0");
  if (!(c_induced >= 0.0)) bad.push_back("c_induced must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) bad.push_back("delta must lie in (0, 1)");
  if (!(gravity >= 0.0)) bad.push_back("gravity must be >= 0");
  return bad;
}

void VehicleParams::validate() const {
  const auto bad = violations();
  if (!bad.empty()) {
    std::ostringstream os;
    os << "invalid vehicle parameters:";
    for (const auto& b : bad) os << "\n  " << b;
    throw Error(ErrorCode::kInvalidConfig, os.str());
  }
}

double VehicleParams::max_tilt_angle() const { return std::asin(delta); }

AeroForce aero_force(const Vec3& velocity, const Vec3& thrust_dir_inertial,
                     const Environment& env, const VehicleParams& p, double t) {
  const Vec3 va = velocity - env.wind_at(t);
  AeroForce f;
  f.orientation_free = -p.c_drag * va.norm() * va - p.c_induced * va;
  f.along_thrust = p.c_induced * va.dot(thrust_dir_inertial);
  return f;
}

Vec3 parasitic_torque(const VehicleState& s, const PlantInput& in, const VehicleParams& p) {
  return Vec3(0.0, 0.0, p.h).cross(-in.thrust * s.thrust_dir.vec());
}

StateDerivative derivative(const VehicleState& s, const PlantInput& in, const Environment& env,
                           const VehicleParams& p, double t, AttitudeModel model) {
  const Vec3 u_i = s.thrust_dir_inertial();
  const AeroForce fa = aero_force(s.velocity, u_i, env, p, t);
  const Vec3 gravity(0.0, 0.0, p.gravity);

  StateDerivative d;
  d.position = s.velocity;
  d.velocity = gravity + (fa.orientation_free + (fa.along_thrust - in.thrust) * u_i) / p.mass;
  d.omega = s.omega;
  if (model == AttitudeModel::kDynamic) {
    const Vec3 torque = -s.omega.cross(p.inertia * s.omega) + parasitic_torque(s, in, p) + in.torque;
    d.omega_dot = p.inertia.ldlt().solve(torque);
  } else {
    d.omega_dot = Vec3::Zero();
  }
  d.thrust_dir = in.tilt_rate;
  return d;
}

namespace {

// Integration variables relative to the attitude at the start of the step.
struct Local {
  Vec3 x, v, theta, w;
};

Local axpy(const Local& a, double h, const Local& k) {
  return {a.x + h * k.x, a.v + h * k.v, a.theta + h * k.theta, a.w + h * k.w};
}

void check_invariants(const VehicleState& s, const VehicleParams& p, double t) {
  std::string why;
  if (!s.position.allFinite() || !s.velocity.allFinite() || !s.omega.allFinite() ||
      !s.attitude.matrix().allFinite()) {
    why = "non-finite state";
  } else if (s.tilt_sine() > p.delta + 1e-9) {
    why = "tilt sine " + std::to_string(s.tilt_sine()) + " exceeds delta";
  }
  if (!why.empty()) {
    throw Error(ErrorCode::kIntegrationFailure,
                "integration failure at t=" + std::to_string(t) + ": " + why);
  }
}

}  // namespace

VehicleState step(const VehicleState& s, const PlantInput& in, const Environment& env,
                  const VehicleParams& p, double t, double dt, AttitudeModel model) {
  const Vec2 u12 = s.thrust_dir.vec().head<2>();
  const Vec2 u12_rate = in.tilt_rate.head<2>();
  if (!(dt > 0.0 && dt <= kMaxStep)) {
    throw std::invalid_argument("step: dt must lie in (0, 0.02] s");
  }
  if ((u12 + dt * u12_rate).squaredNorm() >= 1.0) {
    throw Error(ErrorCode::kIntegrationFailure,
                "integration failure at t=" + std::to_string(t) + ": thrust direction leaves upper hemisphere");
  }

  auto eval = [&](const Local& l, double tau) {
    VehicleState st;
    st.position = l.x;
    st.velocity = l.v;
    st.attitude = Rotation::orthonormalized(s.attitude.matrix() * exp_so3(l.theta));
    st.omega = l.w;
    st.thrust_dir = UnitVec3::from_planar(u12 + tau * u12_rate);
    const StateDerivative d = derivative(st, in, env, p, t + tau, model);
    return Local{d.position, d.velocity, dexp_inv_so3(l.theta, d.omega), d.omega_dot};
  };

  const Local y0{s.position, s.velocity, Vec3::Zero(), s.omega};
  const Local k1 = eval(y0, 0.0);
  const Local k2 = eval(axpy(y0, 0.5 * dt, k1), 0.5 * dt);
  const Local k3 = eval(axpy(y0, 0.5 * dt, k2), 0.5 * dt);
  const Local k4 = eval(axpy(y0, dt, k3), dt);

  const Local y1{
      y0.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
      y0.v + dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
      y0.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
      y0.w + dt / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w),
  };

  VehicleState out;
  out.position = y1.x;
  out.velocity = y1.v;
  out.attitude = Rotation::orthonormalized(s.attitude.matrix() * exp_so3(y1.theta));
  out.omega = y1.w;
  out.thrust_dir = UnitVec3::from_planar(u12 + dt * u12_rate);
  check_invariants(out, p, t + dt);
  return out;
}

}  // namespace tiltvtol
