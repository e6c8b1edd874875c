#pragma once
// Densities live on the lattice h Z^{n-1} restricted to the patch domain U.
// Integrals against the surface measure become h^{n-1}-weighted sums, so the
// L^2 norm of a density is h^{(n-1)/2} times the l^2 norm of its amplitudes.

#include <functional>
#include <memory>
#include <optional>

#include "mlr/geometry/surface.hpp"

namespace mlr {

class SampledDensity {
 public:
  std::shared_ptr<const SurfacePatch> patch;
  double h = 0.0;
  std::vector<Eigen::VectorXi> idx;  // lattice indices; node xi = h * idx
  std::vector<cplx> amp;
  Domain region;  // reference region V containing U; margins are measured to its complement

  using Generator = std::function<cplx(const Vec&)>;

  static SampledDensity sample(std::shared_ptr<const SurfacePatch> patch, double h,
                               Generator gen, std::optional<Domain> reference = std::nullopt) {
    require(patch != nullptr, "SampledDensity: null patch");
    require(h > 0.0, "SampledDensity: spacing must be positive");
    SampledDensity f;
    f.patch = std::move(patch);
    f.h = h;
    f.gen_ = std::move(gen);
    f.region = reference ? std::move(*reference) : default_region(f.patch->domain);
    require(f.patch->domain.covered_by(f.region),
            "SampledDensity: reference region must contain the patch domain");
    const auto& dom = f.patch->domain;
    const int d = dom.dim();
    const auto [lo, hi] = dom.bounding_box();
    Eigen::VectorXi ilo(d), ihi(d);
    for (int i = 0; i < d; ++i) {
      ilo[i] = static_cast<int>(std::ceil(lo[i] / h - 1e-12));
      ihi[i] = static_cast<int>(std::floor(hi[i] / h + 1e-12));
    }
    Eigen::VectorXi it = ilo;
    Vec xi(d);
    while (true) {
      for (int i = 0; i < d; ++i) xi[i] = h * it[i];
      if (dom.contains(xi, 1e-12 * (1.0 + xi.norm()))) {
        f.idx.push_back(it);
        f.amp.push_back(f.gen_(xi));
      }
      int i = d - 1;
      while (i >= 0 && ++it[i] > ihi[i]) {
        it[i] = ilo[i];
        --i;
      }
      if (i < 0) break;
    }
    require(!f.idx.empty(), "SampledDensity: no lattice nodes inside the domain");
    return f;
  }

  int dim() const { return patch->dim(); }
  std::size_t size() const { return idx.size(); }

  Vec node_xi(std::size_t i) const {
    Vec xi(dim());
    for (int k = 0; k < dim(); ++k) xi[k] = h * idx[i][k];
    return xi;
  }

  // L^2(U) norm under the lattice quadrature.
  double l2_norm() const {
    NeumaierSum s;
    for (const auto& a : amp) s.add(std::norm(a));
    return std::sqrt(s.value()) * std::pow(h, 0.5 * dim());
  }

  // Distance from the amplitude support to the complement of the reference
  // region; +inf for an empty support.
  double support_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size(); ++i)
      if (amp[i] != cplx{0.0, 0.0}) m = std::min(m, region.dist_to_complement(node_xi(i)));
    return m;
  }

  SampledDensity normalized() const {
    const double nrm = l2_norm();
    require(nrm > 0.0, "SampledDensity: cannot normalize the zero density");
    SampledDensity g = *this;
    for (auto& a : g.amp) a /= nrm;
    return g;
  }

  // Resample the generator on a finer lattice (quadrature refinement probes).
  SampledDensity refined(double factor) const {
    require(gen_ != nullptr, "SampledDensity: no generator stored, cannot refine");
    require(factor > 1.0, "SampledDensity: refinement factor must exceed 1");
    return sample(patch, h / factor, gen_, region);
  }

  bool has_generator() const { return gen_ != nullptr; }

  static Domain default_region(const Domain& u) {
    if (u.kind == Domain::Kind::ball) return Domain::ball_at(u.center, 1.5 * u.radius);
    return Domain::box_at(u.center, 1.5 * u.half_width);
  }

 private:
  Generator gen_;
};

}  // namespace mlr
