#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tiltvtol/geom.hpp"

namespace tiltvtol::testing {

/// Seeded source of random geometric quantities for property tests.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed = 20240501) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec3 vec(double scale = 1.0) {
    return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
  }

  UnitVec3 direction() {
    std::normal_distribution<double> n;
    Vec3 v;
    do {
      v = Vec3(n(rng_), n(rng_), n(rng_));
    } while (v.norm() < 1e-6);
    return UnitVec3::normalized(v);
  }

  Rotation rotation() {
    return Rotation::from_rotation_vector(direction().vec() * uniform(0.0, 3.1));
  }

  /// Thrust direction in body coordinates with |u_{1,2}| <= max_tilt_sine.
  UnitVec3 tilt(double max_tilt_sine) {
    const double r = max_tilt_sine * std::sqrt(uniform(0.0, 1.0));
    const double a = uniform(-M_PI, M_PI);
    return UnitVec3::from_planar(Vec2(r * std::cos(a), r * std::sin(a)));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace tiltvtol::testing
