#pragma once

#include <Eigen/Core>

namespace tiltvtol {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit-norm 3-vector. Construction renormalizes small drift (|v| within
/// 1e-6 of one) and throws std::invalid_argument for anything else.
class UnitVec3 {
 public:
  static constexpr double kDriftTolerance = 1e-6;

  UnitVec3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVec3(const Vec3& v);
  UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}

  /// Normalizes any non-zero vector; throws on zero or non-finite input.
  static UnitVec3 normalized(const Vec3& v);
  /// (u1, u2, +sqrt(1 - u1^2 - u2^2)); throws unless u1^2 + u2^2 < 1.
  static UnitVec3 from_planar(const Vec2& u12);

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

 private:
  struct Unchecked {};
  UnitVec3(const Vec3& v, Unchecked) : v_(v) {}

  Vec3 v_;
};

/// Proper orthogonal matrix whose columns are the body basis vectors
/// expressed in inertial coordinates (body -> inertial).
class Rotation {
 public:
  static constexpr double kTolerance = 1e-9;

  Rotation() : m_(Mat3::Identity()) {}
  /// Throws std::invalid_argument unless m is orthonormal with det +1
  /// within kTolerance.
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }
  /// Nearest rotation to an almost-orthonormal matrix (polar projection).
  static Rotation orthonormalized(const Mat3& m);
  /// exp(skew(rotation_vector)).
  static Rotation from_rotation_vector(const Vec3& rotation_vector);
  static Rotation about_axis(const Vec3& axis, double angle);

  const Mat3& matrix() const { return m_; }
  Vec3 col(int i) const { return m_.col(i); }
  Rotation transpose() const;
  Rotation operator*(const Rotation& other) const;
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

Mat3 skew(const Vec3& w);
Vec3 vee(const Mat3& m);

/// Matrix exponential of skew(w) via Rodrigues' formula.
Mat3 exp_so3(const Vec3& w);

/// Inverse of the right-trivialized differential of exp on so(3):
/// theta_dot = dexp_inv(theta, omega) for R(t) = R0 exp(skew(theta(t))),
/// with omega the body angular velocity.
Vec3 dexp_inv_so3(const Vec3& theta, const Vec3& omega);

/// Classical saturation min(1, limit/|x|) x. Zero maps to zero.
template <typename Derived>
typename Derived::PlainObject sat(const Eigen::MatrixBase<Derived>& x,
                                  double limit) {
  const double n = x.norm();
  if (n <= limit) return x;
  return (limit / n) * x;
}

/// Jacobian of sat() at x (identity inside the ball, tangential projection
/// scaled by limit/|x| outside).
template <int N>
Eigen::Matrix<double, N, N> sat_jacobian(const Eigen::Matrix<double, N, 1>& x,
                                         double limit) {
  using M = Eigen::Matrix<double, N, N>;
  const double n = x.norm();
  if (n <= limit) return M::Identity();
  const Eigen::Matrix<double, N, 1> e = x / n;
  return (limit / n) * (M::Identity() - e * e.transpose());
}

struct RotationError {
  double angle = 0.0;  // [0, pi]
  UnitVec3 axis;       // (0,0,1) when angle == 0
  bool antipodal = false;
};

/// Angle-axis of the error rotation R_d^T R.
RotationError rotation_error_vector(const Rotation& r, const Rotation& r_desired);

/// R exp(skew(omega_body dt)), re-orthonormalized.
Rotation integrate_rotation(const Rotation& r, const Vec3& omega_body, double dt);

}  // namespace tiltvtol
