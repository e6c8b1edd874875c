#pragma once
// Tubes in the graph frame: the core line passes through the anchor (x_T at
// graph height p_n) with direction v(T) = (-grad phi(xi_T), 1)/W, truncated to
// the segment |t| <= R. Membership and all intersection predicates use the
// exact distance to that segment.

#include "mlr/geometry/surface.hpp"

namespace mlr {

struct Tube {
  std::shared_ptr<const SurfacePatch> patch;
  Vec xi;         // frequency node in R^{n-1}
  Vec x;          // spatial node in R^{n-1}
  Vec direction;  // v(T), unit, positive graph component
  double R = 0.0;
  double delta = 0.0;
  double radius = 0.0;       // R^{1/2+delta}
  double core_radius = 0.0;  // R^{(1+delta)/2}
  double p_n = 0.0;          // recentering height along the graph axis

  // Ambient anchor: x slotted around the graph axis, graph coordinate p_n.
  Vec anchor() const {
    Vec a(patch->ambient_dim);
    const int g = patch->graph_axis - 1;
    int k = 0;
    for (int i = 0; i < patch->ambient_dim; ++i) a[i] = (i == g) ? p_n : x[k++];
    return a;
  }

  double dist_to_axis(const Vec& pt) const {
    const Vec a = anchor();
    const double t = std::clamp((pt - a).dot(direction), -R, R);
    return (pt - a - t * direction).norm();
  }

  // Distance to the thinner tube T' (core_radius around the axis segment).
  double dist_to_core(const Vec& pt) const {
    return std::max(0.0, dist_to_axis(pt) - core_radius);
  }

  bool contains(const Vec& pt) const { return dist_to_axis(pt) <= radius; }

  bool meets_ball(const Vec& c, double r) const { return dist_to_axis(c) <= radius + r; }

  // Angle to a subspace spanned by the orthonormal columns of basis.
  double angle_to(const Mat& basis) const {
    const Vec resid = direction - basis * (basis.transpose() * direction);
    return std::asin(std::clamp(resid.norm(), 0.0, 1.0));
  }
};

inline Tube make_tube(std::shared_ptr<const SurfacePatch> patch, Vec xi, Vec x, double R,
                      double delta, double p_n) {
  require(patch != nullptr, "make_tube: null patch");
  require(R > 0.0 && delta > 0.0, "make_tube: R and delta must be positive");
  Tube t;
  t.patch = std::move(patch);
  t.direction = t.patch->unit_normal(xi);
  t.xi = std::move(xi);
  t.x = std::move(x);
  t.R = R;
  t.delta = delta;
  t.radius = std::pow(R, 0.5 + delta);
  t.core_radius = std::pow(R, 0.5 * (1.0 + delta));
  t.p_n = p_n;
  return t;
}

}  // namespace mlr
