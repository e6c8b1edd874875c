#pragma once
// Numerical realizations of transverse complete intersections: a seeded
// Gauss-Newton sampler for Z(P_1,...,P_m), the transversality certificate on
// the sample, root isolation for square systems, and the symbolic wedge
// polynomial g_w = grad P_1 ^ ... ^ grad P_m ^ w.
//
// Margins are normalized per polynomial by the largest gradient magnitude
// seen on the sample, so they are invariant under rescaling any P_i and they
// vanish both when a gradient dies and when the gradients become linearly
// dependent.

#include <Eigen/Dense>

#include <string>
#include <unordered_map>
#include <vector>

#include "mlr/algebraic/system.hpp"
#include "mlr/geometry/wedge.hpp"

namespace mlr {

struct VarietySample {
  PolySystem system;
  std::vector<Vec> points;     // residual max_i |P_i| <= residual_tol at each
  std::vector<Mat> frames;     // rows = grad P_i at the point
  std::vector<double> margins; // normalized wedge norm of the gradient rows
  double spacing = std::numeric_limits<double>::infinity();  // seeding grid resolution
  std::string diagnostics;

  static constexpr double residual_tol = 1e-8;
};

namespace variety_detail {

// Damped step toward the zero set: minimum-norm solution of J d = P(x) for
// m < n, plain Newton for m = n. Iterates while the residual still improves,
// well past `tol`, so points that creep toward a gradient degeneracy land as
// close to it as double precision allows instead of stopping at the first
// sub-tolerance iterate.
inline bool project_to_zero(const PolySystem& sys, Vec& x, double tol, int max_iter) {
  const double floor_tol = tol * 1e-3;

  // Scalar path for one equation: no Eigen temporaries in the loop.
  if (sys.count() == 1) {
    const Polynomial& P = sys.polys[0];
    const auto& G = sys.grads[0];
    const int n = sys.ambient_dim;
    double rn = std::abs(P.eval(x));
    if (rn <= floor_tol) return true;
    Vec g(n), cand(n);
    for (int it = 0; it < max_iter; ++it) {
      const double r = P.eval(x);
      double jj = 0.0;
      for (int j = 0; j < n; ++j) {
        g[j] = G[static_cast<std::size_t>(j)].eval(x);
        jj += g[j] * g[j];
      }
      if (jj == 0.0) break;
      const double step = r / jj;
      double lambda = 1.0;
      bool moved = false;
      for (int half = 0; half < 14; ++half) {
        for (int j = 0; j < n; ++j) cand[j] = x[j] - lambda * step * g[j];
        const double cn = std::abs(P.eval(cand));
        if (cn < rn) {
          x.swap(cand);
          rn = cn;
          moved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!moved) break;
      if (rn <= floor_tol) return true;
    }
    return rn <= tol;
  }

  double rn = sys.max_residual(x);
  if (rn <= floor_tol) return true;
  for (int it = 0; it < max_iter; ++it) {
    const Vec r = sys.eval(x);
    const Mat J = sys.jacobian(x);
    Vec d;
    if (sys.count() == sys.ambient_dim) {
      Eigen::PartialPivLU<Mat> lu(J);
      d = lu.solve(r);
    } else {
      const Mat JJt = J * J.transpose();
      Eigen::LDLT<Mat> ldlt(JJt);
      if (ldlt.info() != Eigen::Success) break;
      d = J.transpose() * ldlt.solve(r);
    }
    if (!d.allFinite()) break;
    double lambda = 1.0;
    bool moved = false;
    for (int half = 0; half < 14; ++half) {
      const Vec cand = x - lambda * d;
      const double cn = sys.max_residual(cand);
      if (cn < rn) {
        x = cand;
        rn = cn;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) break;
    if (rn <= floor_tol) return true;
  }
  return rn <= tol;
}

// Spatial hash over cells of the dedup radius; the 3^n surrounding cells are
// probed exactly, so two points within the radius always collide.
class DedupGrid {
 public:
  explicit DedupGrid(double radius) : r_(radius) {}

  bool try_insert(const Vec& x, const std::vector<Vec>& accepted) {
    const std::size_t n = static_cast<std::size_t>(x.size());
    base_.resize(n);
    probe_.resize(n);
    off_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) base_[i] = cell_of(x[static_cast<Eigen::Index>(i)]);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) probe_[i] = base_[i] + off_[i];
      const auto it = cells_.find(probe_);
      if (it != cells_.end())
        for (const std::size_t idx : it->second)
          if ((accepted[idx] - x).norm() <= r_) return false;
      std::size_t i = 0;
      while (i < n && off_[i] == 1) {
        off_[i] = -1;
        ++i;
      }
      if (i == n) break;
      ++off_[i];
    }
    cells_[base_].push_back(accepted.size());
    return true;
  }

 private:
  long long cell_of(double c) const { return static_cast<long long>(std::floor(c / r_)); }

  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& k) const {
      std::uint64_t h = 0xcbf29ce484222325ull;
      for (long long c : k) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ull;
      }
      return static_cast<std::size_t>(h);
    }
  };

  double r_;
  std::unordered_map<std::vector<long long>, std::vector<std::size_t>, KeyHash> cells_;
  std::vector<long long> base_, probe_;
  std::vector<int> off_;
};

}  // namespace variety_detail

// Gauss-Newton projection from every node of a grid with the requested
// resolution; converged points are deduplicated at half the resolution in
// seed order, so the output is independent of the thread count.
inline VarietySample variety_sampler(const PolySystem& sys, const Domain& region, double grid_res,
                                     const ExecContext& ctx = {}) {
  require(region.kind == Domain::Kind::box, "variety_sampler: region must be a box");
  require(region.dim() == sys.ambient_dim, "variety_sampler: region dimension mismatch");
  require(grid_res > 0.0, "variety_sampler: grid resolution must be positive");

  const int n = sys.ambient_dim;
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) {
    const double lo = region.center[i] - region.half_width[i];
    const double hi = region.center[i] + region.half_width[i];
    const int count = static_cast<int>(std::lround((hi - lo) / grid_res)) + 1;
    axes[static_cast<std::size_t>(i)] = linspace(lo, hi, std::max(count, 2));
    total *= static_cast<std::int64_t>(axes[static_cast<std::size_t>(i)].size());
  }

  // Slot per seed: converged coordinates, flat to keep the footprint small.
  std::vector<double> landed(static_cast<std::size_t>(total * n));
  std::vector<std::uint8_t> ok(static_cast<std::size_t>(total), 0);
  parallel_chunks(ctx, total, 4096, [&](std::int64_t, std::int64_t b, std::int64_t e) {
    Vec x(n);
    for (std::int64_t s = b; s < e; ++s) {
      std::int64_t rem = s;
      for (int i = 0; i < n; ++i) {
        const auto& ax = axes[static_cast<std::size_t>(i)];
        x[i] = ax[static_cast<std::size_t>(rem % static_cast<std::int64_t>(ax.size()))];
        rem /= static_cast<std::int64_t>(ax.size());
      }
      if (!variety_detail::project_to_zero(sys, x, 1e-12, 60)) continue;
      if (!region.contains(x, grid_res)) continue;
      for (int i = 0; i < n; ++i) landed[static_cast<std::size_t>(s * n + i)] = x[i];
      ok[static_cast<std::size_t>(s)] = 1;
    }
  });

  VarietySample out;
  out.system = sys;
  out.spacing = grid_res;
  variety_detail::DedupGrid dedup(0.5 * grid_res);
  Vec x(n);
  for (std::int64_t s = 0; s < total; ++s) {
    if (!ok[static_cast<std::size_t>(s)]) continue;
    for (int i = 0; i < n; ++i) x[i] = landed[static_cast<std::size_t>(s * n + i)];
    if (!dedup.try_insert(x, out.points)) continue;
    out.points.push_back(x);
    out.frames.push_back(sys.jacobian(x));
  }

  if (out.points.empty()) {
    out.diagnostics = "no Gauss-Newton seed converged to the variety inside the region";
    return out;
  }

  // Normalize gradients by the per-polynomial maximum over the sample, then
  // take the wedge norm; a dead gradient or a dependent frame both score 0.
  Vec scale = Vec::Zero(sys.count());
  for (const auto& F : out.frames)
    for (int i = 0; i < sys.count(); ++i) scale[i] = std::max(scale[i], F.row(i).norm());
  out.margins.reserve(out.points.size());
  for (const auto& F : out.frames) {
    Mat cols(n, sys.count());
    bool dead = false;
    for (int i = 0; i < sys.count(); ++i) {
      if (scale[i] == 0.0) {
        dead = true;
        break;
      }
      cols.col(i) = F.row(i).transpose() / scale[i];
    }
    out.margins.push_back(dead ? 0.0 : wedge_norm(cols));
  }
  return out;
}

struct TciReport {
  bool is_tci = false;
  bool vacuous = false;      // empty sample: nothing to violate transversality
  double min_margin = std::numeric_limits<double>::infinity();
  Vec witness;               // point attaining the minimum margin
};

inline TciReport tci_check(const PolySystem& sys, const Domain& region, double grid_res,
                           const ExecContext& ctx = {}) {
  const auto sample = variety_sampler(sys, region, grid_res, ctx);
  TciReport rep;
  if (sample.points.empty()) {
    rep.is_tci = true;
    rep.vacuous = true;
    return rep;
  }
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    if (sample.margins[i] < rep.min_margin) {
      rep.min_margin = sample.margins[i];
      rep.witness = sample.points[i];
    }
  }
  rep.is_tci = rep.min_margin > 1e-6;
  return rep;
}

// Roots of a square system inside the region: Newton from every grid seed,
// deduplication, then the Bezout count as a hard sanity bound. Points are
// returned in lexicographic order.
inline std::vector<Vec> zero_dim_count(const PolySystem& sys, const Domain& region,
                                       double grid_res, double dedup_radius = -1.0,
                                       const ExecContext& ctx = {}) {
  require(sys.count() == sys.ambient_dim, "zero_dim_count: system must be square (m = n)");
  require(region.kind == Domain::Kind::box, "zero_dim_count: region must be a box");
  require(region.dim() == sys.ambient_dim, "zero_dim_count: region dimension mismatch");
  require(grid_res > 0.0, "zero_dim_count: grid resolution must be positive");
  if (dedup_radius < 0.0) dedup_radius = 0.5 * grid_res;

  const int n = sys.ambient_dim;
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) {
    const double lo = region.center[i] - region.half_width[i];
    const double hi = region.center[i] + region.half_width[i];
    const int count = static_cast<int>(std::lround((hi - lo) / grid_res)) + 1;
    axes[static_cast<std::size_t>(i)] = linspace(lo, hi, std::max(count, 2));
    total *= static_cast<std::int64_t>(axes[static_cast<std::size_t>(i)].size());
  }

  std::vector<double> landed(static_cast<std::size_t>(total * n));
  std::vector<std::uint8_t> ok(static_cast<std::size_t>(total), 0);
  parallel_chunks(ctx, total, 2048, [&](std::int64_t, std::int64_t b, std::int64_t e) {
    Vec x(n);
    for (std::int64_t s = b; s < e; ++s) {
      std::int64_t rem = s;
      for (int i = 0; i < n; ++i) {
        const auto& ax = axes[static_cast<std::size_t>(i)];
        x[i] = ax[static_cast<std::size_t>(rem % static_cast<std::int64_t>(ax.size()))];
        rem /= static_cast<std::int64_t>(ax.size());
      }
      if (!variety_detail::project_to_zero(sys, x, 1e-12, 80)) continue;
      if (!region.contains(x, 1e-9)) continue;
      for (int i = 0; i < n; ++i) landed[static_cast<std::size_t>(s * n + i)] = x[i];
      ok[static_cast<std::size_t>(s)] = 1;
    }
  });

  std::vector<Vec> roots;
  variety_detail::DedupGrid dedup(dedup_radius);
  Vec x(n);
  for (std::int64_t s = 0; s < total; ++s) {
    if (!ok[static_cast<std::size_t>(s)]) continue;
    for (int i = 0; i < n; ++i) x[i] = landed[static_cast<std::size_t>(s * n + i)];
    if (dedup.try_insert(x, roots)) roots.push_back(x);
  }

  if (roots.size() > sys.bezout_bound())
    throw InternalError("zero_dim_count: " + std::to_string(roots.size()) +
                        " points exceed the Bezout bound " + std::to_string(sys.bezout_bound()) +
                        "; raise the dedup radius");

  // Transversality at every root: the Jacobian must be nondegenerate after
  // per-row normalization over the found set.
  if (!roots.empty()) {
    Vec scale = Vec::Zero(n);
    std::vector<Mat> jacs;
    jacs.reserve(roots.size());
    for (const auto& r : roots) {
      jacs.push_back(sys.jacobian(r));
      for (int i = 0; i < n; ++i) scale[i] = std::max(scale[i], jacs.back().row(i).norm());
    }
    for (std::size_t k = 0; k < roots.size(); ++k) {
      double margin = 0.0;
      if (scale.minCoeff() > 0.0) {
        Mat cols(n, n);
        for (int i = 0; i < n; ++i) cols.col(i) = jacs[k].row(i).transpose() / scale[i];
        margin = wedge_norm(cols);
      }
      require(margin > 1e-6, "zero_dim_count: system is not transverse at a computed zero");
    }
  }

  std::sort(roots.begin(), roots.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  });
  return roots;
}

namespace variety_detail {

// Determinant of a matrix of polynomials by cofactor expansion along the row
// with the fewest nonzero entries. Fine for the small m used here.
inline Polynomial poly_det(const std::vector<std::vector<Polynomial>>& a) {
  const std::size_t n = a.size();
  const int nvars = a[0][0].nvars();
  if (n == 1) return a[0][0];
  std::size_t row = 0, best = n + 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t nz = 0;
    for (const auto& e : a[i])
      if (!e.is_zero()) ++nz;
    if (nz < best) {
      best = nz;
      row = i;
    }
  }
  Polynomial det(nvars);
  for (std::size_t c = 0; c < n; ++c) {
    if (a[row][c].is_zero()) continue;
    std::vector<std::vector<Polynomial>> minor;
    minor.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row) continue;
      std::vector<Polynomial> r;
      r.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) r.push_back(a[i][j]);
      minor.push_back(std::move(r));
    }
    const Polynomial term = a[row][c] * poly_det(minor);
    det = ((row + c) % 2 == 0) ? det + term : det - term;
  }
  return det;
}

// k-subsets of {0..n-1} in lexicographic order; this fixes the basis order of
// Lambda^k R^n used for the multivector coefficients.
inline std::vector<std::vector<int>> lex_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace variety_detail

// Appends g_w = grad P_1 ^ ... ^ grad P_m ^ w, expanded symbolically. Sign
// convention: for each basis element e_K of Lambda^{n-m} R^n (K an ascending
// index set, basis sets in lexicographic order), the coefficient multiplying
// w_K is the determinant with the gradient rows first and the rows e_k,
// k in K, after them in ascending order.
inline PolySystem make_zw(const PolySystem& sys, const std::vector<double>& w) {
  const int n = sys.ambient_dim, m = sys.count();
  require(m <= n - 1, "make_zw: appending g_w needs m <= n - 1");
  const auto subsets = variety_detail::lex_subsets(n, n - m);
  require(w.size() == subsets.size(),
          "make_zw: multivector has wrong grade; expected " + std::to_string(subsets.size()) +
              " coefficients");

  Polynomial g(n);
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    if (w[k] == 0.0) continue;
    std::vector<std::vector<Polynomial>> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) rows.push_back(sys.grads[static_cast<std::size_t>(i)]);
    for (int axis : subsets[k]) {
      std::vector<Polynomial> e(static_cast<std::size_t>(n), Polynomial(n));
      e[static_cast<std::size_t>(axis)] = Polynomial::constant(n, 1.0);
      rows.push_back(std::move(e));
    }
    g = g + variety_detail::poly_det(rows).scaled(w[k]);
  }

  int degree_sum = 0;
  for (int d : sys.degrees) degree_sum += d;
  if (g.degree() > degree_sum)
    throw InternalError("make_zw: expanded degree exceeds the sum of system degrees");

  auto polys = sys.polys;
  polys.push_back(std::move(g));
  return make_system(n, std::move(polys));
}

// Angle between a direction and the tangent space at a sample point, as the
// arcsine of the component inside the normal space spanned by the gradients.
inline double normal_space_angle(const Mat& frame_rows, const Vec& v) {
  const Eigen::Index m = frame_rows.rows();
  Eigen::HouseholderQR<Mat> qr(frame_rows.transpose());
  const Mat Q = qr.householderQ() * Mat::Identity(frame_rows.cols(), m);
  const double comp = (Q.transpose() * v).norm();
  return std::asin(std::clamp(comp, 0.0, 1.0));
}

}  // namespace mlr
