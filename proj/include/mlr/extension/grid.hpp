#pragma once
// Cubic evaluation grids covering a ball B(center, R), plus the alias-free
// sampling condition: one grid step may rotate the fastest source phase by at
// most pi, i.e. dx * diam(Sigma(U)) <= pi.

#include "mlr/extension/density.hpp"

namespace mlr {

struct EvaluationGrid {
  Vec center;     // R^n
  double R = 0.0;
  double dx = 0.0;
  int M = 0;      // nodes center + dx*k, k in [-M, M]^n

  static EvaluationGrid cover_ball(Vec center, double R, double dx) {
    require(R > 0.0 && dx > 0.0, "EvaluationGrid: R and dx must be positive");
    EvaluationGrid g;
    g.center = std::move(center);
    g.R = R;
    g.dx = dx;
    g.M = static_cast<int>(std::ceil(R / dx - 1e-12));
    require(g.M >= 1, "EvaluationGrid: grid would have a single node");
    return g;
  }

  int dim() const { return static_cast<int>(center.size()); }
  int per_dim() const { return 2 * M + 1; }
  std::int64_t total() const {
    std::int64_t t = 1;
    for (int i = 0; i < dim(); ++i) t *= per_dim();
    return t;
  }

  void decode(std::int64_t flat, Eigen::VectorXi& k) const {
    const int n = dim();
    k.resize(n);
    for (int i = n - 1; i >= 0; --i) {
      k[i] = static_cast<int>(flat % per_dim()) - M;
      flat /= per_dim();
    }
  }

  Vec node(const Eigen::VectorXi& k) const {
    Vec x = center;
    for (int i = 0; i < dim(); ++i) x[i] += dx * k[i];
    return x;
  }

  bool in_ball(const Eigen::VectorXi& k) const {
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += static_cast<double>(k[i]) * k[i];
    return dx * std::sqrt(s) <= R + 1e-12;
  }

  void require_alias_free(const SurfacePatch& p) const {
    const double diam = p.surface_diameter();
    require(dx * diam <= M_PI + 1e-9,
            "EvaluationGrid: dx violates the alias-free condition dx * diam(Sigma(U)) <= pi");
  }
};

struct Field {
  EvaluationGrid grid;
  std::vector<cplx> values;  // row-major, first axis slowest

  const cplx& at(const Eigen::VectorXi& k) const {
    std::int64_t flat = 0;
    for (int i = 0; i < grid.dim(); ++i) flat = flat * grid.per_dim() + (k[i] + grid.M);
    return values[static_cast<std::size_t>(flat)];
  }
};

}  // namespace mlr
