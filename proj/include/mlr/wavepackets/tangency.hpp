#pragma once
// Tangential / non-tangential / disjoint classification of a tube against a
// sampled variety near a ball. The relation is decided pointwise on the
// sample pairs that matter: z within twice the ball radius of its center and
// within 2 alpha R of the solid tube. Tangential means the tube direction
// stays within angle alpha of the tangent space at every such sample.

#include "mlr/algebraic/variety.hpp"
#include "mlr/wavepackets/ops.hpp"
#include "mlr/wavepackets/tube.hpp"

namespace mlr {

enum class TubeClass { tangential = 0, non_tangential = 1, disjoint = 2 };

inline TubeClass classify_tube(const Tube& t, const VarietySample& Z, const BallRegion& ball,
                               double alpha) {
  require(alpha > 0.0 && alpha < 1.5, "classify_tube: alpha must be in (0, 1.5)");
  require(ball.radius > 0.0, "classify_tube: ball radius must be positive");
  const double need = alpha * t.R / 10.0;
  if (!(Z.spacing <= need))
    throw InvalidInput("classify_tube: sample spacing " + std::to_string(Z.spacing) +
                       " exceeds the required alpha R / 10 = " + std::to_string(need));

  bool any = false;
  for (std::size_t i = 0; i < Z.points.size(); ++i) {
    const Vec& z = Z.points[i];
    if ((z - ball.center).norm() > 2.0 * ball.radius) continue;
    if (std::max(0.0, t.dist_to_axis(z) - t.radius) > 2.0 * alpha * t.R) continue;
    any = true;
    if (normal_space_angle(Z.frames[i], t.direction) > alpha) return TubeClass::non_tangential;
  }
  return any ? TubeClass::tangential : TubeClass::disjoint;
}

}  // namespace mlr
