#include "tiltvtol/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace tiltvtol {

ReferenceSample lissajous(double t, double frequency, double amplitude) {
  if (!(frequency > 0.0)) throw std::invalid_argument("lissajous: frequency must be > 0");
  const double w = frequency;
  const double a = amplitude;
  const double s1 = std::sin(w * t), c1 = std::cos(w * t);
  const double s2 = std::sin(2.0 * w * t), c2 = std::cos(2.0 * w * t);

  ReferenceSample r;
  r.position = Vec3(a * s1, a * s2, 0.0);
  r.velocity = Vec3(a * w * c1, 2.0 * a * w * c2, 0.0);
  r.acceleration = Vec3(-a * w * w * s1, -4.0 * a * w * w * s2, 0.0);
  r.jerk = Vec3(-a * w * w * w * c1, -8.0 * a * w * w * w * c2, 0.0);
  return r;
}

ReferenceSample constant_velocity(double t, const Vec3& velocity) {
  ReferenceSample r;
  r.position = velocity * t;
  r.velocity = velocity;
  return r;
}

ReferenceSample hover(double, const Vec3& position) {
  ReferenceSample r;
  r.position = position;
  return r;
}

}  // namespace tiltvtol
