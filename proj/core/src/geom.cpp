#include "tiltvtol/geom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tiltvtol {

UnitVec3::UnitVec3(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kDriftTolerance) {
    throw std::invalid_argument("UnitVec3: norm " + std::to_string(n) +
                                " is not within 1e-6 of 1");
  }
  v_ = v / n;
}

UnitVec3 UnitVec3::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("UnitVec3: cannot normalize zero or non-finite vector");
  }
  return UnitVec3(v / n);
}

UnitVec3 UnitVec3::from_planar(const Vec2& u12) {
  const double r2 = u12.squaredNorm();
  if (!(r2 < 1.0)) {
    throw std::invalid_argument("UnitVec3: planar part must lie inside the unit disc");
  }
  return UnitVec3(Vec3(u12.x(), u12.y(), std::sqrt(1.0 - r2)), Unchecked{});
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = m.determinant();
  if (!(ortho <= kTolerance) || !(std::abs(det - 1.0) <= kTolerance)) {
    throw std::invalid_argument("Rotation: matrix is not a proper rotation");
  }
}

Rotation Rotation::orthonormalized(const Mat3& m) {
  // Newton iteration for the polar factor; converges quadratically from a
  // near-orthonormal start.
  Mat3 r = m;
  for (int i = 0; i < 3; ++i) {
    const Mat3 e = r.transpose() * r - Mat3::Identity();
    if (e.cwiseAbs().maxCoeff() < 1e-15) break;
    r = r * (1.5 * Mat3::Identity() - 0.5 * r.transpose() * r);
  }
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
    r = svd.matrixU() * d * svd.matrixV().transpose();
  }
  return Rotation(r, Unchecked{});
}

Rotation Rotation::from_rotation_vector(const Vec3& rotation_vector) {
  return Rotation(exp_so3(rotation_vector), Unchecked{});
}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  return from_rotation_vector(axis.normalized() * angle);
}

Rotation Rotation::transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(m_ * other.m_, Unchecked{});
}

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Mat3 exp_so3(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 k = skew(w);
  double a;  // sin(t)/t
  double b;  // (1-cos(t))/t^2
  if (theta2 < 1e-8) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 dexp_inv_so3(const Vec3& theta, const Vec3& omega) {
  const double t2 = theta.squaredNorm();
  double c;
  if (t2 < 1e-6) {
    c = 1.0 / 12.0 + t2 / 720.0;
  } else {
    const double t = std::sqrt(t2);
    c = 1.0 / t2 - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  }
  const Vec3 tw = theta.cross(omega);
  return omega + 0.5 * tw + c * theta.cross(tw);
}

RotationError rotation_error_vector(const Rotation& r, const Rotation& r_desired) {
  const Mat3 e = r_desired.matrix().transpose() * r.matrix();
  const Vec3 s = 0.5 * vee(e - e.transpose());  // sin(theta) nu
  const double c = 0.5 * (e.trace() - 1.0);     // cos(theta)
  const double angle = std::atan2(s.norm(), c);

  RotationError out;
  out.angle = angle;
  if (angle == 0.0) return out;

  if (angle < std::numbers::pi / 2) {
    out.axis = UnitVec3::normalized(s);
  } else {
    // Near pi the antisymmetric part vanishes; take the axis from the
    // symmetric part (1-cos) nu nu^T, using its largest diagonal entry.
    const Mat3 b = 0.5 * (e + e.transpose()) - c * Mat3::Identity();
    Eigen::Index k;
    b.diagonal().maxCoeff(&k);
    Vec3 axis = b.col(k);
    if (axis.dot(s) < 0.0) axis = -axis;
    out.axis = UnitVec3::normalized(axis);
  }
  out.antipodal = (std::numbers::pi - angle) < 1e-9;
  return out;
}

Rotation integrate_rotation(const Rotation& r, const Vec3& omega_body, double dt) {
  return Rotation::orthonormalized(r.matrix() * exp_so3(omega_body * dt));
}

}  // namespace tiltvtol
