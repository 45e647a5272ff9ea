#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

#include "tiltvtol/geom.hpp"
#include "tiltvtol/plant.hpp"

namespace tiltvtol {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// Thrust and body torque.
struct Wrench {
  double thrust = 0.0;
  Vec3 torque = Vec3::Zero();

  Vec4 stacked() const { return Vec4(thrust, torque.x(), torque.y(), torque.z()); }
  static Wrench from_stacked(const Vec4& w) { return {w[0], w.tail<3>()}; }
};

struct RotorLimits {
  std::optional<double> max_speed_sq;  // rad^2/s^2

  bool operator==(const RotorLimits&) const = default;
};

struct RotorCommand {
  Vec4 speed_sq = Vec4::Zero();  // varpi_i^2, rotors 1..4
  bool feasible = true;
  Vec4 clip = Vec4::Zero();      // clipped - requested, per rotor
  Wrench achieved;               // forward map of speed_sq
};

/// Maps (varpi_1^2 .. varpi_4^2) to (T, Gamma) for four rotors pivoting at
/// h k + d i, h k - d j, h k - d i, h k + d j, all spinning about u, with
/// alternating drag-torque signs (+ for odd rotors). Throws
/// Error(kSingularAllocation) when u_3 <= 0.
Mat4 build_allocation_matrix(const UnitVec3& u, const VehicleParams& p);

/// det = 8 kappa d^2 mu^3 u_3.
double allocation_determinant(const UnitVec3& u, const VehicleParams& p);

Wrench forward_map(const Vec4& speed_sq, const UnitVec3& u, const VehicleParams& p);

/// Exact solve, then componentwise clamp into [0, max]. The achieved wrench
/// is always the forward map of the emitted speeds.
RotorCommand allocate(const Wrench& demand, const UnitVec3& u, const VehicleParams& p,
                      const RotorLimits& limits = {});

}  // namespace tiltvtol
