#include "tiltvtol/allocation.hpp"

#include <Eigen/LU>

#include "tiltvtol/errors.hpp"

namespace tiltvtol {

namespace {

constexpr double kMinAxial = 1e-9;

void require_upper_hemisphere(const UnitVec3& u) {
  if (!(u.z() > kMinAxial)) {
    throw Error(ErrorCode::kSingularAllocation,
                "allocation matrix singular: thrust direction has u_3 <= 0");
  }
}

}  // namespace

Mat4 build_allocation_matrix(const UnitVec3& u, const VehicleParams& p) {
  require_upper_hemisphere(u);
  const double mu = p.mu, ka = p.kappa, h = p.h, d = p.d;
  const double u1 = u.x(), u2 = u.y(), u3 = u.z();
  Mat4 a;
  // clang-format off
  a << mu,                          mu,                          mu,                          mu,
       -h*mu*u2 + ka*u1,            -h*mu*u2 - d*mu*u3 - ka*u1,  -h*mu*u2 + ka*u1,            -h*mu*u2 + d*mu*u3 - ka*u1,
       h*mu*u1 - d*mu*u3 + ka*u2,   h*mu*u1 - ka*u2,             h*mu*u1 + d*mu*u3 + ka*u2,   h*mu*u1 - ka*u2,
       d*mu*u2 + ka*u3,             d*mu*u1 - ka*u3,             -d*mu*u2 + ka*u3,            -d*mu*u1 - ka*u3;
  // clang-format on
  return a;
}

double allocation_determinant(const UnitVec3& u, const VehicleParams& p) {
  return 8.0 * p.kappa * p.d * p.d * p.mu * p.mu * p.mu * u.z();
}

Wrench forward_map(const Vec4& speed_sq, const UnitVec3& u, const VehicleParams& p) {
  return Wrench::from_stacked(build_allocation_matrix(u, p) * speed_sq);
}

RotorCommand allocate(const Wrench& demand, const UnitVec3& u, const VehicleParams& p,
                      const RotorLimits& limits) {
  const Mat4 a = build_allocation_matrix(u, p);
  const Vec4 requested = a.partialPivLu().solve(demand.stacked());

  RotorCommand out;
  out.speed_sq = requested.cwiseMax(0.0);
  if (limits.max_speed_sq) out.speed_sq = out.speed_sq.cwiseMin(*limits.max_speed_sq);
  out.clip = out.speed_sq - requested;
  out.feasible = (out.clip.array() == 0.0).all();
  out.achieved = Wrench::from_stacked(a * out.speed_sq);
  return out;
}

}  // namespace tiltvtol
