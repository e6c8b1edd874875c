#pragma once
// Parameter domains U, V in R^d (d = ambient_dim - 1): balls and boxes.
// Sample grids always include the domain extremes so that certificate minima
// attained on the boundary are hit exactly at every refinement level.

#include <Eigen/Dense>

#include "mlr/base.hpp"

namespace mlr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Domain {
  enum class Kind { ball, box };

  Kind kind = Kind::ball;
  Vec center;      // R^d
  double radius = 0.0;  // ball
  Vec half_width;  // box

  static Domain ball_at(Vec c, double r) {
    require(r > 0, "Domain: ball radius must be positive");
    Domain d;
    d.kind = Kind::ball;
    d.center = std::move(c);
    d.radius = r;
    return d;
  }
  static Domain box_at(Vec c, Vec hw) {
    require(c.size() == hw.size(), "Domain: center/half_width size mismatch");
    require(hw.minCoeff() > 0, "Domain: box half widths must be positive");
    Domain d;
    d.kind = Kind::box;
    d.center = std::move(c);
    d.half_width = std::move(hw);
    return d;
  }

  int dim() const { return static_cast<int>(center.size()); }

  bool contains(const Vec& x, double slop = 0.0) const {
    if (kind == Kind::ball) return (x - center).norm() <= radius + slop;
    for (int i = 0; i < dim(); ++i)
      if (std::abs(x[i] - center[i]) > half_width[i] + slop) return false;
    return true;
  }

  // Distance from an interior point to the complement; 0 outside.
  double dist_to_complement(const Vec& x) const {
    if (kind == Kind::ball) return std::max(0.0, radius - (x - center).norm());
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i) m = std::min(m, half_width[i] - std::abs(x[i] - center[i]));
    return std::max(0.0, m);
  }

  double diameter() const {
    if (kind == Kind::ball) return 2.0 * radius;
    return 2.0 * half_width.norm();
  }

  // Superset test good enough for configuration validation: V covers this
  // domain iff it contains a dense sample of boundary and bulk points.
  bool covered_by(const Domain& v, int probes_per_dim = 9) const {
    for (const auto& x : sample_grid(probes_per_dim))
      if (!v.contains(x, 1e-12)) return false;
    return true;
  }

  std::pair<Vec, Vec> bounding_box() const {
    if (kind == Kind::ball) {
      return {center.array() - radius, center.array() + radius};
    }
    return {center - half_width, center + half_width};
  }

  double volume() const {
    const int d = dim();
    if (kind == Kind::box) {
      double v = 1.0;
      for (int i = 0; i < d; ++i) v *= 2.0 * half_width[i];
      return v;
    }
    // Unit-ball volume pi^{d/2}/Gamma(d/2+1).
    double unit = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    return unit * ipow(radius, d);
  }

  // Product grid with m points per axis (boxes) or a polar product grid with m
  // radii (balls); ball grids contain the exact boundary sphere and center.
  std::vector<Vec> sample_grid(int m) const {
    require(m >= 2, "Domain: sample resolution must be >= 2");
    const int d = dim();
    std::vector<Vec> out;
    if (kind == Kind::box) {
      std::vector<std::vector<double>> axes(d);
      for (int i = 0; i < d; ++i)
        axes[i] = linspace(center[i] - half_width[i], center[i] + half_width[i], m);
      Vec x(d);
      std::vector<int> idx(d, 0);
      while (true) {
        for (int i = 0; i < d; ++i) x[i] = axes[i][idx[i]];
        out.push_back(x);
        int i = d - 1;
        while (i >= 0 && ++idx[i] == m) idx[i--] = 0;
        if (i < 0) break;
      }
      return out;
    }
    if (d == 1) {
      for (double t : linspace(center[0] - radius, center[0] + radius, 2 * m + 1)) {
        Vec x(1);
        x[0] = t;
        out.push_back(x);
      }
      return out;
    }
    // Hyperspherical product: radii x (d-2 polar angles in [0,pi]) x azimuth.
    const auto radii = linspace(0.0, radius, m);
    const auto polar = linspace(0.0, M_PI, m);
    std::vector<double> azim(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < 2 * m; ++i) azim[i] = 2.0 * M_PI * i / (2.0 * m);
    std::vector<std::vector<double>> angles(d - 1);
    for (int a = 0; a + 1 < d - 1; ++a) angles[a] = polar;
    angles[d - 2] = azim;

    Vec x(d);
    std::vector<int> idx(d - 1, 0);
    for (double r : radii) {
      if (r == 0.0) {
        out.push_back(center);
        continue;
      }
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        double s = 1.0;
        for (int a = 0; a < d - 1; ++a) {
          const double th = angles[a][idx[a]];
          x[a] = center[a] + r * s * std::cos(th);
          s *= std::sin(th);
        }
        x[d - 1] = center[d - 1] + r * s;
        // Convention above: coordinate a uses cos of angle a scaled by the
        // running product of sines; the last coordinate takes the full product.
        out.push_back(x);
        int a = d - 2;
        while (a >= 0 && ++idx[a] == static_cast<int>(angles[a].size())) idx[a--] = 0;
        if (a < 0) break;
      }
    }
    return out;
  }

  // Upper bound for the distance from any domain point to its nearest
  // sample_grid(m) node; feeds Lipschitz slack in certificates.
  double covering_radius(int m) const {
    const int d = dim();
    if (kind == Kind::box) {
      double s2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const double step = 2.0 * half_width[i] / (m - 1);
        s2 += step * step;
      }
      return 0.5 * std::sqrt(s2);
    }
    if (d == 1) return radius / (2.0 * m);
    const double dr = radius / (m - 1);
    const double darc = radius * (M_PI / (m - 1));
    return 0.5 * std::sqrt(dr * dr + (d - 1) * darc * darc);
  }
};

}  // namespace mlr
