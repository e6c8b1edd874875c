#pragma once
// Systems P_1, ..., P_m of real polynomials on R^n with m <= n. Polynomials
// are stored in ascending degree order and the gradient of each one is
// expanded symbolically once, so Jacobians are exact evaluations rather than
// difference quotients.

#include <Eigen/Dense>

#include "mlr/geometry/domain.hpp"
#include "mlr/polynomial.hpp"

namespace mlr {

struct PolySystem {
  int ambient_dim = 0;
  std::vector<Polynomial> polys;               // ascending degree, ties in input order
  std::vector<int> degrees;                    // D_1 <= ... <= D_m
  std::vector<std::vector<Polynomial>> grads;  // grads[i][j] = d P_i / d x_j

  int count() const { return static_cast<int>(polys.size()); }

  Vec eval(const Vec& x) const {
    Vec r(count());
    for (int i = 0; i < count(); ++i) r[i] = polys[static_cast<std::size_t>(i)].eval(x);
    return r;
  }

  double max_residual(const Vec& x) const {
    double m = 0.0;
    for (const auto& p : polys) m = std::max(m, std::abs(p.eval(x)));
    return m;
  }

  // Rows are the gradients grad P_i.
  Mat jacobian(const Vec& x) const {
    Mat J(count(), ambient_dim);
    for (int i = 0; i < count(); ++i)
      for (int j = 0; j < ambient_dim; ++j)
        J(i, j) = grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(x);
    return J;
  }

  std::uint64_t bezout_bound() const {
    std::uint64_t b = 1;
    for (int d : degrees) b *= static_cast<std::uint64_t>(std::max(d, 1));
    return b;
  }
};

inline PolySystem make_system(int ambient_dim, std::vector<Polynomial> polys) {
  require(ambient_dim >= 1, "make_system: ambient dimension must be positive");
  require(!polys.empty(), "make_system: need at least one polynomial");
  require(static_cast<int>(polys.size()) <= ambient_dim,
          "make_system: more polynomials than ambient dimensions");
  for (const auto& p : polys)
    require(p.nvars() == ambient_dim, "make_system: polynomial variable count mismatch");
  std::stable_sort(polys.begin(), polys.end(),
                   [](const Polynomial& a, const Polynomial& b) { return a.degree() < b.degree(); });
  PolySystem sys;
  sys.ambient_dim = ambient_dim;
  sys.polys = std::move(polys);
  for (const auto& p : sys.polys) {
    sys.degrees.push_back(p.degree());
    std::vector<Polynomial> g;
    g.reserve(static_cast<std::size_t>(ambient_dim));
    for (int j = 0; j < ambient_dim; ++j) g.push_back(p.partial(j));
    sys.grads.push_back(std::move(g));
  }
  return sys;
}

}  // namespace mlr
