#pragma once
// Graph-parametrized hypersurface patches S = {x : x_axis = phi(xi)} with
// exact first and second derivatives per family. The unit normal convention
// keeps a positive component along the graph axis.

#include <memory>

#include "mlr/geometry/domain.hpp"
#include "mlr/polynomial.hpp"

namespace mlr {

enum class SurfaceFamily { paraboloid, sphere_cap, cone, cylinder, polynomial };

inline const char* family_name(SurfaceFamily f) {
  switch (f) {
    case SurfaceFamily::paraboloid: return "paraboloid";
    case SurfaceFamily::sphere_cap: return "sphere_cap";
    case SurfaceFamily::cone: return "cone";
    case SurfaceFamily::cylinder: return "cylinder";
    case SurfaceFamily::polynomial: return "polynomial";
  }
  return "?";
}

class SurfacePatch {
 public:
  int ambient_dim = 3;   // n >= 2
  int graph_axis = 3;    // 1-based ambient slot carrying phi(xi)
  SurfaceFamily family = SurfaceFamily::paraboloid;
  double scale = 1.0;    // paraboloid |xi|^2 * scale/2, cylinder profile, cone slope
  double radius = 1.0;   // sphere_cap radius
  int profile_axis = 1;  // cylinder: 1-based parameter coordinate with curvature
  Polynomial poly;       // polynomial family graph map
  Domain domain;         // U in R^{n-1}
  double deriv_bound = 4.0;  // C: bound for phi-derivatives up to order n_smooth on U
  int n_smooth = 4;
  bool small_diameter = false;
  double measured_normal_diam = 0.0;

  int dim() const { return ambient_dim - 1; }
  int axis0() const { return graph_axis - 1; }

  // --- graph map -----------------------------------------------------------

  double phi(const Vec& xi) const {
    switch (family) {
      case SurfaceFamily::paraboloid: return 0.5 * scale * xi.squaredNorm();
      case SurfaceFamily::sphere_cap: return std::sqrt(radius * radius - xi.squaredNorm());
      case SurfaceFamily::cone: return scale * xi.norm();
      case SurfaceFamily::cylinder: {
        const double t = xi[profile_axis - 1];
        return 0.5 * scale * t * t;
      }
      case SurfaceFamily::polynomial: return poly.eval(xi);
    }
    return 0.0;
  }

  Vec grad_phi(const Vec& xi) const {
    const int d = dim();
    Vec g = Vec::Zero(d);
    switch (family) {
      case SurfaceFamily::paraboloid: g = scale * xi; break;
      case SurfaceFamily::sphere_cap: g = -xi / phi(xi); break;
      case SurfaceFamily::cone: g = scale * xi / xi.norm(); break;
      case SurfaceFamily::cylinder: g[profile_axis - 1] = scale * xi[profile_axis - 1]; break;
      case SurfaceFamily::polynomial:
        for (int i = 0; i < d; ++i) g[i] = grad_cache_[i].eval(xi);
        break;
    }
    return g;
  }

  Mat hess_phi(const Vec& xi) const {
    const int d = dim();
    Mat h = Mat::Zero(d, d);
    switch (family) {
      case SurfaceFamily::paraboloid: h = scale * Mat::Identity(d, d); break;
      case SurfaceFamily::sphere_cap: {
        const double p = phi(xi);
        h = -(Mat::Identity(d, d) / p + (xi * xi.transpose()) / (p * p * p));
        break;
      }
      case SurfaceFamily::cone: {
        const double r = xi.norm();
        const Vec u = xi / r;
        h = scale * (Mat::Identity(d, d) - u * u.transpose()) / r;
        break;
      }
      case SurfaceFamily::cylinder: h(profile_axis - 1, profile_axis - 1) = scale; break;
      case SurfaceFamily::polynomial:
        for (int i = 0; i < d; ++i)
          for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = hess_cache_[i * d + j].eval(xi);
        break;
    }
    return h;
  }

  // --- embedding -----------------------------------------------------------

  // Place (parameter components, graph value) into ambient slots.
  Vec lift(const Vec& param_part, double axis_value) const {
    Vec x(ambient_dim);
    int j = 0;
    for (int i = 0; i < ambient_dim; ++i) x[i] = (i == axis0()) ? axis_value : param_part[j++];
    return x;
  }

  Vec embed(const Vec& xi) const { return lift(xi, phi(xi)); }

  // d(embed): n x (n-1).
  Mat differential(const Vec& xi) const {
    const int n = ambient_dim, d = dim();
    Mat J = Mat::Zero(n, d);
    const Vec g = grad_phi(xi);
    int row = 0;
    for (int i = 0; i < n; ++i) {
      if (i == axis0()) {
        J.row(i) = g.transpose();
      } else {
        J(i, row++) = 1.0;
      }
    }
    return J;
  }

  Vec unit_normal(const Vec& xi) const {
    const Vec g = grad_phi(xi);
    Vec nu = lift(-g, 1.0);
    return nu / nu.norm();
  }

  // Orthonormal tangent frame, n x (n-1); deterministic column signs.
  Mat tangent_frame(const Vec& xi) const {
    const Mat J = differential(xi);
    Eigen::HouseholderQR<Mat> qr(J);
    Mat Q = qr.householderQ() * Mat::Identity(ambient_dim, dim());
    const Mat R = qr.matrixQR().topRows(dim()).triangularView<Eigen::Upper>();
    for (int c = 0; c < dim(); ++c)
      if (R(c, c) < 0) Q.col(c) = -Q.col(c);
    return Q;
  }

  // --- measured quantities ---------------------------------------------------

  double normal_diameter(int samples_per_dim = 12) const {
    const auto grid = domain.sample_grid(samples_per_dim);
    std::vector<Vec> normals;
    normals.reserve(grid.size());
    for (const auto& xi : grid) normals.push_back(unit_normal(xi));
    double best = 0.0;
    for (std::size_t i = 0; i < normals.size(); ++i)
      for (std::size_t j = i + 1; j < normals.size(); ++j)
        best = std::max(best, (normals[i] - normals[j]).norm());
    return best;
  }

  // Diameter of Sigma(U) in R^n; drives alias-free grid spacing.
  double surface_diameter(int samples_per_dim = 12) const {
    const auto grid = domain.sample_grid(samples_per_dim);
    Vec lo = embed(grid.front()), hi = lo;
    for (const auto& xi : grid) {
      const Vec p = embed(xi);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
  }

  // --- construction ----------------------------------------------------------

  void finalize(double c_small = 0.1) {
    require(ambient_dim >= 2, "SurfacePatch: ambient_dim must be >= 2");
    require(graph_axis >= 1 && graph_axis <= ambient_dim, "SurfacePatch: graph_axis out of range");
    require(domain.dim() == dim(), "SurfacePatch: domain dimension must be ambient_dim - 1");
    require(deriv_bound > 0, "SurfacePatch: deriv_bound must be positive");
    require(n_smooth >= 2, "SurfacePatch: smoothness order must be >= 2");
    const auto [lo, hi] = domain.bounding_box();
    switch (family) {
      case SurfaceFamily::sphere_cap: {
        require(radius > 0, "sphere_cap: radius must be positive");
        const double reach = std::max(lo.norm(), hi.norm());
        require(reach < 0.95 * radius, "sphere_cap: domain must stay clear of the equator");
        break;
      }
      case SurfaceFamily::cone: {
        // Apex excluded: the domain may not touch the origin.
        Vec nearest = Vec::Zero(dim());
        if (domain.kind == Domain::Kind::ball) {
          require(domain.center.norm() > domain.radius + 1e-9, "cone: domain must exclude the apex");
        } else {
          for (int i = 0; i < dim(); ++i)
            nearest[i] = std::clamp(0.0, domain.center[i] - domain.half_width[i],
                                    domain.center[i] + domain.half_width[i]);
          require(nearest.norm() > 1e-9, "cone: domain must exclude the apex");
        }
        break;
      }
      case SurfaceFamily::cylinder:
        require(profile_axis >= 1 && profile_axis <= dim(), "cylinder: profile_axis out of range");
        break;
      case SurfaceFamily::polynomial: {
        require(poly.nvars() == dim(), "polynomial: variable count must match ambient_dim - 1");
        const int d = dim();
        grad_cache_.clear();
        hess_cache_.clear();
        for (int i = 0; i < d; ++i) grad_cache_.push_back(poly.partial(i));
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) hess_cache_.push_back(grad_cache_[i].partial(j));
        break;
      }
      default: break;
    }
    measured_normal_diam = normal_diameter();
    if (small_diameter && measured_normal_diam > c_small)
      throw DomainViolation("SurfacePatch: small_diameter flag set but measured normal diameter " +
                            std::to_string(measured_normal_diam) + " exceeds " + std::to_string(c_small));
  }

 private:
  std::vector<Polynomial> grad_cache_, hess_cache_;
};

inline SurfacePatch make_paraboloid(int n, Domain dom, double scale = 1.0, int graph_axis = -1) {
  SurfacePatch p;
  p.ambient_dim = n;
  p.graph_axis = graph_axis < 0 ? n : graph_axis;
  p.family = SurfaceFamily::paraboloid;
  p.scale = scale;
  p.domain = std::move(dom);
  p.finalize();
  return p;
}

inline SurfacePatch make_sphere_cap(int n, Domain dom, double radius = 1.0, int graph_axis = -1) {
  SurfacePatch p;
  p.ambient_dim = n;
  p.graph_axis = graph_axis < 0 ? n : graph_axis;
  p.family = SurfaceFamily::sphere_cap;
  p.radius = radius;
  p.domain = std::move(dom);
  p.finalize();
  return p;
}

inline SurfacePatch make_cone(int n, Domain dom, double scale = 1.0, int graph_axis = -1) {
  SurfacePatch p;
  p.ambient_dim = n;
  p.graph_axis = graph_axis < 0 ? n : graph_axis;
  p.family = SurfaceFamily::cone;
  p.scale = scale;
  p.domain = std::move(dom);
  p.finalize();
  return p;
}

inline SurfacePatch make_cylinder(int n, Domain dom, double scale = 1.0, int profile_axis = 1,
                                  int graph_axis = -1) {
  SurfacePatch p;
  p.ambient_dim = n;
  p.graph_axis = graph_axis < 0 ? n : graph_axis;
  p.family = SurfaceFamily::cylinder;
  p.scale = scale;
  p.profile_axis = profile_axis;
  p.domain = std::move(dom);
  p.finalize();
  return p;
}

inline SurfacePatch make_polynomial_graph(int n, Domain dom, Polynomial poly, int graph_axis = -1) {
  SurfacePatch p;
  p.ambient_dim = n;
  p.graph_axis = graph_axis < 0 ? n : graph_axis;
  p.family = SurfaceFamily::polynomial;
  p.poly = std::move(poly);
  p.domain = std::move(dom);
  p.finalize();
  return p;
}

// Affine graphs are polynomial patches; handy for flat test surfaces.
inline SurfacePatch make_flat(int n, Domain dom, const Vec& slope, double offset = 0.0,
                              int graph_axis = -1) {
  Polynomial q = Polynomial::constant(n - 1, offset);
  for (int i = 0; i < n - 1; ++i)
    if (slope[i] != 0.0) q = q + Polynomial::linear(n - 1, i, slope[i]);
  return make_polynomial_graph(n, std::move(dom), std::move(q), graph_axis);
}

}  // namespace mlr
