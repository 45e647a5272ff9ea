#pragma once

#include <functional>

#include "tiltvtol/geom.hpp"

namespace tiltvtol {

struct ReferenceSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
};

using Trajectory = std::function<ReferenceSample(double)>;

/// Horizontal figure-eight (A sin(wt), A sin(2wt), 0).
ReferenceSample lissajous(double t, double frequency, double amplitude = 5.0);

ReferenceSample constant_velocity(double t, const Vec3& velocity);

ReferenceSample hover(double t, const Vec3& position);

}  // namespace tiltvtol
