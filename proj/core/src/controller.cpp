#include "tiltvtol/controller.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tiltvtol/errors.hpp"

namespace tiltvtol {

std::vector<std::string> Gains::violations() const {
  std::vector<std::string> bad;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) bad.push_back(std::string(name) + " must be > 0");
  };
  positive(k1, "k1");
  positive(k2, "k2");
  positive(k3, "k3");
  positive(k4, "k4");
  positive(k_u, "k_u");
  positive(k_omega, "k_omega");
  positive(beta, "beta");
  positive(eta, "eta");
  positive(k_z, "k_z");
  positive(k_zdot, "k_zdot");
  positive(zddot_max, "zddot_max");
  positive(delta_z, "delta_z");
  if (!(k_integral >= 0.0) || !std::isfinite(k_integral)) bad.push_back("k_integral must be >= 0");
  return bad;
}

void Gains::validate() const {
  const auto bad = violations();
  if (!bad.empty()) {
    std::ostringstream os;
    os << "invalid gains:";
    for (const auto& b : bad) os << "\n  " << b;
    throw Error(ErrorCode::kInvalidConfig, os.str());
  }
}

Vec3 sigma(const Vec3& y, double beta, double eta) {
  const double r = beta * beta * y.squaredNorm() / (eta * eta);
  return beta / std::sqrt(r + 1.0) * y;
}

Mat3 sigma_jacobian(const Vec3& y, double beta, double eta) {
  const double s = 1.0 / std::sqrt(beta * beta * y.squaredNorm() / (eta * eta) + 1.0);
  return beta * s * (Mat3::Identity() - (s * s * beta * beta / (eta * eta)) * y * y.transpose());
}

namespace {

struct IntegratorTerms {
  Vec3 inner;  // z + x~/k_z
  Vec3 outer;  // k_z (-z + sat(inner))
};

IntegratorTerms integrator_terms(const Vec3& z, const Vec3& pos_error, const Gains& g) {
  IntegratorTerms it;
  it.inner = z + pos_error / g.k_z;
  it.outer = g.k_z * (-z + sat(it.inner, g.delta_z));
  return it;
}

// Exact for z_ddot held over the step.
void integrate(ControllerState& cs, const Vec3& zdd, double dt) {
  cs.z += dt * cs.z_dot + 0.5 * dt * dt * zdd;
  cs.z_dot += dt * zdd;
}

}  // namespace

Vec3 integrator_accel(const Vec3& z, const Vec3& z_dot, const Vec3& pos_error, const Gains& g) {
  const IntegratorTerms it = integrator_terms(z, pos_error, g);
  return -g.k_zdot * z_dot + sat(it.outer, 0.5 * g.zddot_max);
}

void advance_integrator(ControllerState& cs, const Vec3& pos_error, const Gains& g, double dt) {
  integrate(cs, integrator_accel(cs.z, cs.z_dot, pos_error, g), dt);
}

RateEstimate rate_estimates(ControllerState& cs, double thrust_ref, const UnitVec3& dir_ref,
                            double dt, double tau) {
  const Vec3& u_r = dir_ref.vec();
  if (!cs.has_previous) {
    cs.has_previous = true;
    cs.thrust_ref_prev = thrust_ref;
    cs.dir_ref_prev = u_r;
    cs.rates = RateEstimate{};
    return cs.rates;
  }
  const double alpha = dt / (tau + dt);
  const double raw_thrust = (thrust_ref - cs.thrust_ref_prev) / dt;
  const Vec3 raw_dir = (u_r - cs.dir_ref_prev) / dt;
  cs.rates.thrust_ref_rate += alpha * (raw_thrust - cs.rates.thrust_ref_rate);
  Vec3 filtered = cs.rates.dir_ref_rate + alpha * (raw_dir - cs.rates.dir_ref_rate);
  // d/dt of a unit vector is tangent to the sphere
  cs.rates.dir_ref_rate = filtered - u_r * u_r.dot(filtered);
  cs.thrust_ref_prev = thrust_ref;
  cs.dir_ref_prev = u_r;
  return cs.rates;
}

namespace {

Mat3 drag_jacobian(const Vec3& va, const VehicleParams& p) {
  const double n = va.norm();
  Mat3 j = -p.c_induced * Mat3::Identity();
  if (n > 0.0) j -= p.c_drag * (n * Mat3::Identity() + va * va.transpose() / n);
  return j;
}

struct PrimaryInputs {
  Vec3 force;          // F or F_xi
  Vec3 force_aero1;    // F1
  Vec3 velocity_error; // v~ or v~_xi
  double aero_along_thrust = 0.0;  // F2
  Vec3 thrust_dir;     // u, inertial
};

// Common part of the velocity and position laws. `force_rate` maps the
// inertial acceleration implied by T_bar to dF/dt for RateSource::kModel.
template <typename ForceRate>
PrimaryCommand primary_law(const PrimaryInputs& in, const VehicleParams& p, const Gains& g,
                           ControllerState& cs, double t, double dt, RateSource source,
                           const Thresholds& th, ForceRate&& force_rate) {
  const double m = p.mass;
  const double thrust_ref = in.force.norm();
  if (!(thrust_ref > th.min_force)) {
    throw Error(ErrorCode::kSingularThrust,
                "t=" + std::to_string(t) + ": |F| = " + std::to_string(thrust_ref) +
                    " below threshold, thrust reference undefined");
  }
  const Vec3 u_r = in.force / thrust_ref;
  const Vec3& u = in.thrust_dir;
  const Vec3& vt = in.velocity_error;
  const double c = u.dot(u_r);
  if (!(c > -1.0 + th.min_alignment)) {
    throw Error(ErrorCode::kAntipodalDirection,
                "t=" + std::to_string(t) + ": thrust direction antipodal to its reference");
  }

  PrimaryCommand cmd;
  cmd.thrust_ref = thrust_ref;
  cmd.dir_ref = UnitVec3::normalized(u_r);
  cmd.velocity_error = vt;
  cmd.thrust_bar = thrust_ref * c + g.k1 * m * u.dot(vt);
  cmd.thrust = cmd.thrust_bar + in.aero_along_thrust;

  if (source == RateSource::kFiltered) {
    cmd.rates = rate_estimates(cs, thrust_ref, cmd.dir_ref, dt, th.rate_filter_tau);
  } else {
    const Vec3 accel = Vec3(0.0, 0.0, p.gravity) + (in.force_aero1 - cmd.thrust_bar * u) / m;
    const Vec3 f_dot = force_rate(accel);
    cmd.rates.thrust_ref_rate = u_r.dot(f_dot);
    cmd.rates.dir_ref_rate = (f_dot - u_r * u_r.dot(f_dot)) / thrust_ref;
  }

  const double one_plus_c = 1.0 + c;
  const double k3_bar = 2.0 * cmd.rates.thrust_ref_rate * one_plus_c / thrust_ref;
  const Vec3 ff = u_r.cross(cmd.rates.dir_ref_rate);
  cmd.tilt_rate_inertial = (g.k2 * m / thrust_ref) * u.cross(vt) +
                           ((g.k3 + k3_bar) / (one_plus_c * one_plus_c)) * u.cross(u_r) -
                           u.cross(u.cross(ff));

  const double tm2 = thrust_ref * thrust_ref / (m * m);
  const double uv = u.dot(vt);
  cmd.lyapunov = tm2 * (1.0 - c) / g.k2 + 0.5 * vt.squaredNorm();
  cmd.lyapunov_rate = -(g.k3 / g.k2) * tm2 * u.cross(u_r).squaredNorm() / (one_plus_c * one_plus_c) -
                      g.k1 * uv * uv;
  return cmd;
}

}  // namespace

PrimaryCommand primary_velocity(const VehicleState& s, const ReferenceSample& ref,
                                const Environment& env, const VehicleParams& p, const Gains& g,
                                ControllerState& cs, double t, double dt, RateSource rates,
                                const Thresholds& th) {
  const double m = p.mass;
  const Vec3 u = s.thrust_dir_inertial();
  const AeroForce fa = aero_force(s.velocity, u, env, p, t);

  PrimaryInputs in;
  in.thrust_dir = u;
  in.force_aero1 = fa.orientation_free;
  in.aero_along_thrust = fa.along_thrust;
  in.velocity_error = s.velocity - ref.velocity;
  in.force = m * Vec3(0.0, 0.0, p.gravity) + fa.orientation_free - m * ref.acceleration;

  const Mat3 jac = drag_jacobian(s.velocity - env.wind_at(t), p);
  return primary_law(in, p, g, cs, t, dt, rates, th,
                     [&](const Vec3& accel) -> Vec3 { return jac * accel - m * ref.jerk; });
}

PrimaryCommand primary_position(const VehicleState& s, const ReferenceSample& ref,
                                const Environment& env, const VehicleParams& p, const Gains& g,
                                ControllerState& cs, double t, double dt, RateSource rates,
                                const Thresholds& th) {
  const double m = p.mass;
  const Vec3 u = s.thrust_dir_inertial();
  const AeroForce fa = aero_force(s.velocity, u, env, p, t);
  const Vec3 pos_err = s.position - ref.position;
  const Vec3 vel_err = s.velocity - ref.velocity;

  const IntegratorTerms it = integrator_terms(cs.z, pos_err, g);
  const Vec3 zdd = -g.k_zdot * cs.z_dot + sat(it.outer, 0.5 * g.zddot_max);
  const Vec3 xi = pos_err + g.k_integral * cs.z;
  const Vec3 vel_err_xi = vel_err + g.k_integral * cs.z_dot;

  PrimaryInputs in;
  in.thrust_dir = u;
  in.force_aero1 = fa.orientation_free;
  in.aero_along_thrust = fa.along_thrust;
  in.velocity_error = vel_err_xi;
  in.force = m * Vec3(0.0, 0.0, p.gravity) + fa.orientation_free - m * ref.acceleration +
             m * g.k_integral * zdd + m * sigma(xi, g.beta, g.eta);

  const Mat3 jac = drag_jacobian(s.velocity - env.wind_at(t), p);
  const Vec3 outer_rate =
      g.k_z * (-cs.z_dot + sat_jacobian<3>(it.inner, g.delta_z) * (cs.z_dot + vel_err / g.k_z));
  const Vec3 zddd = -g.k_zdot * zdd + sat_jacobian<3>(it.outer, 0.5 * g.zddot_max) * outer_rate;
  const Mat3 sigma_jac = sigma_jacobian(xi, g.beta, g.eta);

  PrimaryCommand cmd = primary_law(in, p, g, cs, t, dt, rates, th, [&](const Vec3& accel) -> Vec3 {
    return jac * accel - m * ref.jerk + m * g.k_integral * zddd + m * sigma_jac * vel_err_xi;
  });

  integrate(cs, zdd, dt);
  return cmd;
}

SecondaryCommand secondary_direction(const VehicleState& s, const UnitVec3& eta, double lambda,
                                     const Gains& g, const Thresholds& th) {
  const Vec3 eta_b = s.attitude.matrix().transpose() * eta.vec();
  const Vec3 k(0.0, 0.0, 1.0);
  const double c = eta_b.z();
  if (!(c > -1.0 + th.min_alignment)) {
    throw Error(ErrorCode::kAntipodalDirection, "body axis antipodal to the target direction");
  }
  SecondaryCommand cmd;
  cmd.omega = g.k4 / ((1.0 + c) * (1.0 + c)) * k.cross(eta_b) + lambda * k;
  return cmd;
}

SecondaryCommand secondary_attitude(const VehicleState& s, const Rotation& desired, const Gains& g,
                                    const Thresholds& th) {
  const RotationError err = rotation_error_vector(s.attitude, desired);
  SecondaryCommand cmd;
  cmd.near_antipodal = err.angle >= std::numbers::pi - th.antipodal_attitude;
  cmd.omega = -g.k4 * std::tan(0.5 * err.angle) * err.axis.vec();
  const double n = cmd.omega.norm();
  if (!(n <= th.omega_max)) {
    cmd.omega *= th.omega_max / n;
    cmd.clamped = true;
  }
  return cmd;
}

TiltCommand tilt_and_omega(const VehicleState& s, const PrimaryCommand& primary,
                           const SecondaryCommand& secondary, const Gains& g,
                           const VehicleParams& p) {
  const Vec3& u = s.thrust_dir.vec();
  const Vec3& w_star = secondary.omega;

  TiltCommand cmd;
  cmd.primary_tilt_omega = s.attitude.matrix().transpose() * primary.tilt_rate_inertial;
  const Vec3 w_star_axial = u * u.dot(w_star);
  const Vec3 tilt_omega_star = cmd.primary_tilt_omega - (w_star - w_star_axial);
  const Vec3 tilt_rate_star = tilt_omega_star.cross(u);

  const Vec2 u12 = u.head<2>();
  const Vec2 target = u12 + tilt_rate_star.head<2>() / g.k_u;
  cmd.saturated = target.norm() > p.delta;
  const Vec2 rate12 = -g.k_u * u12 + g.k_u * sat(target, p.delta);
  cmd.tilt_rate = Vec3(rate12.x(), rate12.y(), -u12.dot(rate12) / u.z());

  cmd.tilt_omega = u.cross(cmd.tilt_rate);
  cmd.omega = cmd.primary_tilt_omega - cmd.tilt_omega + w_star_axial;
  return cmd;
}

Vec3 inner_torque(const VehicleState& s, const Vec3& omega_cmd,
                  const std::optional<Vec3>& omega_cmd_rate,
                  const std::optional<Vec3>& parasitic_estimate, const VehicleParams& p,
                  const Gains& g, InnerLoopMode mode) {
  const Mat3& inertia = p.inertia;
  const Vec3& w = s.omega;
  Vec3 torque = -g.k_omega * inertia * (w - omega_cmd) + w.cross(inertia * omega_cmd);
  if (mode == InnerLoopMode::kFull) {
    if (omega_cmd_rate) torque += inertia * *omega_cmd_rate;
    if (parasitic_estimate) torque -= *parasitic_estimate;
  }
  return torque;
}

}  // namespace tiltvtol
