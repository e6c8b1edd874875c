#pragma once
// Norm-level measurements of extension fields: the multilinear L^p product
// norm over a ball, conservation of slice L^2 mass along the graph axis, and
// radial decay profiles with directional mesh refinement.

#include "mlr/extension/evaluate.hpp"

namespace mlr {

struct MultilinearOptions {
  EvalMethod method = EvalMethod::automatic;
  bool refine_check = true;      // repeat at dx/1.5 and compare
  double refine_factor = 1.5;
  double rel_tol = 0.02;
};

struct MultilinearResult {
  double value = 0.0;
  double refined = 0.0;   // 0 when the check is disabled
  bool converged = true;
  double dx = 0.0;
  std::int64_t nodes_in_ball = 0;
};

namespace detail {

inline double multilinear_once(const std::vector<SampledDensity>& fs, const Vec& center, double R,
                               double p, double dx, EvalMethod method, const ExecContext& ctx,
                               std::int64_t* count_out) {
  const auto grid = EvaluationGrid::cover_ball(center, R, dx);
  // One field at a time bounds the live memory at two grids.
  std::vector<double> prodmag(static_cast<std::size_t>(grid.total()), 1.0);
  for (const auto& f : fs) {
    const Field field = evaluate_extension(f, grid, method, ctx);
    for (std::size_t i = 0; i < prodmag.size(); ++i) prodmag[i] *= std::abs(field.values[i]);
  }
  NeumaierSum sum;
  std::int64_t count = 0;
  Eigen::VectorXi k(grid.dim());
  for (std::int64_t i = 0; i < grid.total(); ++i) {
    grid.decode(i, k);
    if (!grid.in_ball(k)) continue;
    ++count;
    sum.add(std::pow(prodmag[static_cast<std::size_t>(i)], p));
  }
  if (count_out) *count_out = count;
  return std::pow(sum.value() * ipow(grid.dx, grid.dim()), 1.0 / p);
}

}  // namespace detail

// || prod_i E_i f_i ||_{L^p(B(center,R))} by lattice quadrature in x.
inline MultilinearResult multilinear_lhs(const std::vector<SampledDensity>& fs, const Vec& center,
                                         double R, double p, double dx,
                                         const MultilinearOptions& opt = {},
                                         const ExecContext& ctx = {}) {
  require(!fs.empty(), "multilinear_lhs: need at least one density");
  require(p > 0.0, "multilinear_lhs: p must be positive");
  for (const auto& f : fs)
    require(f.patch->ambient_dim == static_cast<int>(center.size()),
            "multilinear_lhs: density/center dimension mismatch");
  MultilinearResult res;
  res.dx = dx;
  res.value = detail::multilinear_once(fs, center, R, p, dx, opt.method, ctx, &res.nodes_in_ball);
  if (opt.refine_check) {
    res.refined =
        detail::multilinear_once(fs, center, R, p, dx / opt.refine_factor, opt.method, ctx, nullptr);
    res.converged = std::abs(res.refined - res.value) <=
                    opt.rel_tol * std::max(res.value, 1e-300);
  }
  return res;
}

// --- slice conservation -----------------------------------------------------

struct SliceSpec {
  enum class Mode { full_period, windowed };
  Mode mode = Mode::full_period;
  double spacing = 0.5;  // target spacing (full_period rounds to divide 2pi/h)
  double extent = 0.0;   // windowed half-width of the slice box
};

struct ConservationReport {
  std::vector<double> t_values;
  std::vector<double> norms;          // slice L^2 norms
  double plancherel_expected = 0.0;   // (2pi)^{(n-1)/2} ||f||
  double max_rel_deviation = 0.0;     // against the first slice
  double spacing_used = 0.0;
  std::int64_t points_per_dim = 0;
};

namespace detail {

// L^2 norm of x' -> h^{n-1} sum_j amp_j e^{i(x'.xi_j + t phi_j)} sampled on a
// uniform slice grid.
inline double slice_norm(const SampledDensity& f, double t, double spacing, std::int64_t lo,
                         std::int64_t npts, const ExecContext& ctx) {
  const int d = f.dim();
  const auto J = f.size();
  std::vector<cplx> coef(J);
  const double w = std::pow(f.h, d);
  for (std::size_t j = 0; j < J; ++j) {
    const double ph = t * f.patch->phi(f.node_xi(j));
    coef[j] = w * f.amp[j] * cplx{std::cos(ph), std::sin(ph)};
  }
  // Per-source per-dim phase tables over the slice range.
  std::vector<cplx> pow(static_cast<std::size_t>(J) * d * static_cast<std::size_t>(npts));
  for (std::size_t j = 0; j < J; ++j)
    for (int a = 0; a < d; ++a) {
      const double step = spacing * f.h * f.idx[j][a];
      for (std::int64_t k = 0; k < npts; ++k) {
        const double ang = step * static_cast<double>(lo + k);
        pow[(static_cast<std::size_t>(j) * d + static_cast<std::size_t>(a)) *
                static_cast<std::size_t>(npts) +
            static_cast<std::size_t>(k)] = {std::cos(ang), std::sin(ang)};
      }
    }
  std::int64_t rows = 1;
  for (int a = 0; a + 1 < d; ++a) rows *= npts;
  std::vector<double> part(static_cast<std::size_t>(std::max<std::int64_t>(1, rows)), 0.0);
  parallel_chunks(ctx, rows, std::max<std::int64_t>(1, rows / 64),
                  [&](std::int64_t, std::int64_t b, std::int64_t e) {
                    std::vector<cplx> rowfac(J);
                    std::vector<std::int64_t> k(static_cast<std::size_t>(d), 0);
                    for (std::int64_t row = b; row < e; ++row) {
                      std::int64_t rest = row;
                      for (int a = d - 2; a >= 0; --a) {
                        k[static_cast<std::size_t>(a)] = rest % npts;
                        rest /= npts;
                      }
                      for (std::size_t j = 0; j < J; ++j) {
                        cplx fac = coef[j];
                        for (int a = 0; a + 1 < d; ++a)
                          fac *= pow[(j * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)) *
                                         static_cast<std::size_t>(npts) +
                                     static_cast<std::size_t>(k[static_cast<std::size_t>(a)])];
                        rowfac[j] = fac;
                      }
                      NeumaierSum s;
                      for (std::int64_t kk = 0; kk < npts; ++kk) {
                        cplx acc{0.0, 0.0};
                        for (std::size_t j = 0; j < J; ++j)
                          acc += rowfac[j] *
                                 pow[(j * static_cast<std::size_t>(d) + static_cast<std::size_t>(d) - 1) *
                                         static_cast<std::size_t>(npts) +
                                     static_cast<std::size_t>(kk)];
                        s.add(std::norm(acc));
                      }
                      part[static_cast<std::size_t>(row)] = s.value();
                    }
                  });
  NeumaierSum total;
  for (double v : part) total.add(v);
  return std::sqrt(total.value() * ipow(spacing, d));
}

}  // namespace detail

inline ConservationReport conservation_check(const SampledDensity& f,
                                             const std::vector<double>& t_values,
                                             const SliceSpec& spec = {},
                                             const ExecContext& ctx = {}) {
  require(!t_values.empty(), "conservation_check: need at least one slice");
  require(spec.spacing > 0.0, "conservation_check: spacing must be positive");
  const int d = f.dim();
  // Integer frequency span per dimension decides alias safety.
  std::int64_t span = 0;
  for (int a = 0; a < d; ++a) {
    int lo = f.idx[0][a], hi = lo;
    for (const auto& ix : f.idx) {
      lo = std::min(lo, ix[a]);
      hi = std::max(hi, ix[a]);
    }
    span = std::max<std::int64_t>(span, hi - lo);
  }
  const double period = 2.0 * M_PI / f.h;

  ConservationReport rep;
  rep.t_values = t_values;
  rep.plancherel_expected = std::pow(2.0 * M_PI, 0.5 * d) * f.l2_norm();

  double spacing;
  std::int64_t lo, npts;
  if (spec.mode == SliceSpec::Mode::full_period) {
    npts = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(period / spec.spacing)),
                                  span + 1);
    spacing = period / static_cast<double>(npts);
    lo = 0;
  } else {
    require(spec.extent > 0.0, "conservation_check: windowed mode needs a positive extent");
    spacing = spec.spacing;
    require(spacing * f.h * static_cast<double>(span) <= M_PI + 1e-9,
            "conservation_check: slice spacing violates the alias-free condition");
    const auto mw = static_cast<std::int64_t>(std::floor(spec.extent / spacing + 1e-12));
    lo = -mw;
    npts = 2 * mw + 1;
  }
  rep.spacing_used = spacing;
  rep.points_per_dim = npts;

  for (double t : t_values) rep.norms.push_back(detail::slice_norm(f, t, spacing, lo, npts, ctx));
  const double base = rep.norms[0];
  require(base > 0.0, "conservation_check: vanishing base slice norm");
  for (double v : rep.norms)
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, std::abs(v - base) / base);
  return rep;
}

// --- radial decay ------------------------------------------------------------

struct DecayMesh {
  int polar = 17;    // inclination samples including both poles (n = 3)
  int azimuth = 32;  // includes the zero meridian
  int refine_levels = 2;
  int keep_top = 6;
};

struct DecayProfile {
  std::vector<double> radii;
  std::vector<double> max_abs;
  std::vector<Vec> argmax;
  double slope = 0.0;      // least squares in log-log
  double intercept = 0.0;
  double max_fit_residual = 0.0;
};

namespace detail {

inline std::vector<Vec> sphere_mesh(int n, int polar, int azimuth) {
  std::vector<Vec> dirs;
  if (n == 2) {
    for (int i = 0; i < azimuth; ++i) {
      const double a = 2.0 * M_PI * i / azimuth;
      Vec v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(v);
    }
    return dirs;
  }
  require(n == 3, "sphere_mesh: ambient dimension must be 2 or 3");
  for (double th : linspace(0.0, M_PI, polar))
    for (int i = 0; i < azimuth; ++i) {
      const double ph = 2.0 * M_PI * i / azimuth;
      Vec v(3);
      v << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
      dirs.push_back(v);
      if (th == 0.0 || th == M_PI) break;  // poles once
    }
  return dirs;
}

inline Vec angles_of(const Vec& dir) {
  if (dir.size() == 2) {
    Vec a(1);
    a[0] = std::atan2(dir[1], dir[0]);
    return a;
  }
  Vec a(2);
  a[0] = std::acos(std::clamp(dir[2], -1.0, 1.0));
  a[1] = std::atan2(dir[1], dir[0]);
  return a;
}

inline Vec dir_of(const Vec& a, int n) {
  Vec v(n);
  if (n == 2) {
    v << std::cos(a[0]), std::sin(a[0]);
  } else {
    v << std::sin(a[0]) * std::cos(a[1]), std::sin(a[0]) * std::sin(a[1]), std::cos(a[0]);
  }
  return v;
}

}  // namespace detail

inline DecayProfile decay_profile(const SampledDensity& f, const std::vector<double>& radii,
                                  const DecayMesh& mesh = {}, const ExecContext& ctx = {}) {
  require(radii.size() >= 2, "decay_profile: need at least two radii");
  const int n = f.patch->ambient_dim;
  const auto base_dirs = detail::sphere_mesh(n, mesh.polar, mesh.azimuth);
  DecayProfile prof;
  prof.radii = radii;

  for (double r : radii) {
    require(r > 0.0, "decay_profile: radii must be positive");
    // Stage 1: coarse mesh.
    std::vector<Vec> pts;
    pts.reserve(base_dirs.size());
    for (const auto& d : base_dirs) pts.push_back(r * d);
    auto vals = evaluate_extension_at(f, pts, ctx);
    std::vector<std::size_t> order(vals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = std::abs(vals[a]), vb = std::abs(vals[b]);
      if (va != vb) return va > vb;
      return a < b;
    });
    double best = std::abs(vals[order[0]]);
    Vec best_dir = base_dirs[order[0]];

    // Stage 2: local refinement around the leading candidates.
    const int keep = std::min<int>(mesh.keep_top, static_cast<int>(order.size()));
    double dth = (n == 3) ? M_PI / (mesh.polar - 1) : 2.0 * M_PI / mesh.azimuth;
    double dph = 2.0 * M_PI / mesh.azimuth;
    for (int lev = 0; lev < mesh.refine_levels; ++lev) {
      std::vector<Vec> cand;
      for (int c = 0; c < keep; ++c) {
        const Vec a0 = detail::angles_of(lev == 0 ? base_dirs[order[static_cast<std::size_t>(c)]]
                                                  : best_dir);
        for (int i = -2; i <= 2; ++i)
          for (int j = -2; j <= 2; ++j) {
            Vec a = a0;
            a[0] += i * dth / 4.0;
            if (n == 3)
              a[1] += j * dph / 4.0;
            else if (j != 0)
              continue;
            cand.push_back(detail::dir_of(a, n));
          }
      }
      std::vector<Vec> cpts;
      cpts.reserve(cand.size());
      for (const auto& d : cand) cpts.push_back(r * d);
      const auto cvals = evaluate_extension_at(f, cpts, ctx);
      for (std::size_t i = 0; i < cvals.size(); ++i)
        if (std::abs(cvals[i]) > best) {
          best = std::abs(cvals[i]);
          best_dir = cand[i];
        }
      dth /= 4.0;
      dph /= 4.0;
    }
    prof.max_abs.push_back(best);
    prof.argmax.push_back(best_dir);
  }

  // Log-log least squares.
  const auto m = static_cast<double>(radii.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(prof.max_abs[i] > 0.0, "decay_profile: vanishing maximum, cannot fit");
    const double x = std::log(radii[i]), y = std::log(prof.max_abs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  prof.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  prof.intercept = (sy - prof.slope * sx) / m;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double fit = prof.intercept + prof.slope * std::log(radii[i]);
    prof.max_fit_residual = std::max(prof.max_fit_residual, std::abs(std::log(prof.max_abs[i]) - fit));
  }
  return prof;
}

}  // namespace mlr
