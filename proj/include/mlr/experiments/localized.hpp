#pragma once
// Small-support densities: amplitudes confined to a mu-neighborhood of a
// coordinate-slice submanifold of each patch, gated by the wedge of the
// slices' normal planes. The scaling check measures how the multilinear
// norm tracks the (prod mu_j)^{1/2} factor across a mu schedule.

#include <optional>

#include <Eigen/QR>

#include "mlr/experiments/families.hpp"
#include "mlr/extension/norms.hpp"
#include "mlr/geometry/certificates.hpp"

namespace mlr {

// S' = { xi : xi_axis = value }, codimension one inside the patch.
struct CoordinateSlice {
  int axis = 0;
  double value = 0.0;
};

struct LocalizedSupportSpec {
  std::vector<std::optional<CoordinateSlice>> slices;  // nullopt: S_i' = S_i
  std::vector<double> mu;                              // per patch; unused without a slice
  double density_h = 1.0 / 32.0;
  double normal_wedge = 0.0;  // certificate value; fill via localized_support_certificate
};

namespace localized_detail {

// Orthonormal basis of the normal plane of S_i' at xi: a single unit normal
// for a full patch, normal plus the slice-transverse tangent direction for a
// coordinate slice.
inline Mat normal_plane_basis(const SurfacePatch& patch, const Vec& xi,
                              const std::optional<CoordinateSlice>& slice) {
  const int n = patch.ambient_dim;
  if (!slice) return patch.unit_normal(xi);
  const int d = patch.dim();
  const Mat dS = patch.differential(xi);
  Mat tang(n, d - 1);
  int c = 0;
  for (int a = 0; a < d; ++a)
    if (a != slice->axis) tang.col(c++) = dS.col(a);
  Eigen::HouseholderQR<Mat> qr(tang);
  const Mat q = qr.householderQ();
  return q.rightCols(n - (d - 1));
}

// Sample points of S_i': the whole parameter grid, or the slice restricted
// to the domain.
inline std::vector<Vec> sample_submanifold(const SurfacePatch& patch,
                                           const std::optional<CoordinateSlice>& slice, int m) {
  if (!slice) return patch.domain.sample_grid(m);
  const int d = patch.dim();
  require(slice->axis >= 0 && slice->axis < d, "localized support: slice axis out of range");
  const auto [lo, hi] = patch.domain.bounding_box();
  std::vector<int> free_axes;
  for (int a = 0; a < d; ++a)
    if (a != slice->axis) free_axes.push_back(a);
  std::vector<Vec> out;
  std::vector<std::int64_t> k(free_axes.size(), 0);
  Vec xi(d);
  while (true) {
    xi[slice->axis] = slice->value;
    for (std::size_t i = 0; i < free_axes.size(); ++i) {
      const double t = static_cast<double>(k[i]) / static_cast<double>(m - 1);
      xi[free_axes[i]] = lo[free_axes[i]] + t * (hi[free_axes[i]] - lo[free_axes[i]]);
    }
    if (patch.domain.contains(xi, 1e-12)) out.push_back(xi);
    if (free_axes.empty()) break;
    std::size_t i = free_axes.size();
    bool done = false;
    while (true) {
      if (i == 0) {
        done = true;
        break;
      }
      --i;
      if (++k[i] < m) break;
      k[i] = 0;
    }
    if (done) break;
  }
  return out;
}

// Ambient sample of the slice for distance queries, at parameter step <= s.
inline std::vector<Vec> embedded_slice(const SurfacePatch& patch, const CoordinateSlice& slice,
                                       double s) {
  const auto [lo, hi] = patch.domain.bounding_box();
  double span = 0.0;
  for (int a = 0; a < patch.dim(); ++a)
    if (a != slice.axis) span = std::max(span, hi[a] - lo[a]);
  const int m = std::max(2, static_cast<int>(std::ceil(span / s)) + 1);
  const auto params = sample_submanifold(patch, slice, m);
  std::vector<Vec> pts;
  pts.reserve(params.size());
  for (const auto& xi : params) pts.push_back(patch.embed(xi));
  return pts;
}

}  // namespace localized_detail

// Minimum over sampled tuples (zeta_1, .., zeta_k), zeta_i in S_i', of the
// wedge of the normal planes N_{zeta_i} S_i'. Positive iff the localization
// directions of all patches stay jointly independent.
inline double localized_support_certificate(const SurfaceSystem& sys,
                                            const LocalizedSupportSpec& spec,
                                            int samples_per_dim, const ExecContext& ctx = {}) {
  sys.validate();
  const int k = sys.k();
  const int n = sys.ambient_dim();
  require(static_cast<int>(spec.slices.size()) == k && static_cast<int>(spec.mu.size()) == k,
          "localized_support_certificate: spec arity must match the system");
  require(samples_per_dim >= 2, "localized_support_certificate: samples_per_dim must be >= 2");

  int cols = 0;
  std::vector<std::vector<Mat>> bases(static_cast<std::size_t>(k));
  std::vector<std::int64_t> sizes;
  std::int64_t total = 1;
  for (int i = 0; i < k; ++i) {
    const auto& patch = sys.patches[static_cast<std::size_t>(i)];
    const auto pts = localized_detail::sample_submanifold(patch, spec.slices[static_cast<std::size_t>(i)],
                                                          samples_per_dim);
    require(!pts.empty(), "localized_support_certificate: slice misses the domain of patch " +
                              std::to_string(i + 1));
    for (const auto& xi : pts)
      bases[static_cast<std::size_t>(i)].push_back(
          localized_detail::normal_plane_basis(patch, xi, spec.slices[static_cast<std::size_t>(i)]));
    cols += static_cast<int>(bases[static_cast<std::size_t>(i)].front().cols());
    sizes.push_back(static_cast<std::int64_t>(pts.size()));
    total *= sizes.back();
  }
  if (cols > n) return 0.0;  // more localization directions than the space admits

  const auto score = [&](std::int64_t flat) {
    Mat joint(n, cols);
    std::int64_t rest = flat;
    int at = 0;
    for (int i = k - 1; i >= 0; --i) {
      const Mat& b = bases[static_cast<std::size_t>(i)][static_cast<std::size_t>(rest % sizes[static_cast<std::size_t>(i)])];
      rest /= sizes[static_cast<std::size_t>(i)];
      joint.middleCols(at, static_cast<int>(b.cols())) = b;
      at += static_cast<int>(b.cols());
    }
    return wedge_norm(joint);
  };
  return parallel_argmin(ctx, total, score).first;
}

// Random-phase density supported on the lattice nodes whose surface image
// lies within mu_i of the slice; full support when the patch has no slice.
inline SampledDensity generate_localized_density(std::shared_ptr<const SurfacePatch> patch,
                                                 const LocalizedSupportSpec& spec, int i,
                                                 std::uint64_t seed) {
  require(patch != nullptr, "generate_localized_density: null patch");
  require(i >= 0 && i < static_cast<int>(spec.slices.size()),
          "generate_localized_density: patch index out of range");
  require(spec.normal_wedge > 0.0,
          "generate_localized_density: normal wedge certificate is not positive; "
          "run localized_support_certificate first");
  const double mu = spec.mu[static_cast<std::size_t>(i)];
  require(mu > 0.0, "generate_localized_density: mu must be positive");

  SampledDensity f = SampledDensity::sample(patch, spec.density_h,
                                            [](const Vec&) { return cplx{1.0, 0.0}; });
  const auto& slice = spec.slices[static_cast<std::size_t>(i)];
  const CounterRng rng(seed);
  std::size_t kept = 0;
  if (slice) {
    const auto pts =
        localized_detail::embedded_slice(*patch, *slice, std::min(spec.density_h, mu / 8.0));
    for (std::size_t j = 0; j < f.size(); ++j) {
      const Vec x = patch->embed(f.node_xi(j));
      double dist = std::numeric_limits<double>::infinity();
      for (const auto& p : pts) dist = std::min(dist, (x - p).norm());
      if (dist <= mu) {
        const double th = 2.0 * M_PI * rng.unit(j);
        f.amp[j] = cplx{std::cos(th), std::sin(th)};
        ++kept;
      } else {
        f.amp[j] = cplx{0.0, 0.0};
      }
    }
    if (kept == 0)
      throw InvalidInput("generate_localized_density: no lattice node lies within mu = " +
                         std::to_string(mu) + " of the slice; increase mu");
  } else {
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double th = 2.0 * M_PI * rng.unit(j);
      f.amp[j] = cplx{std::cos(th), std::sin(th)};
    }
  }
  return f.normalized();
}

// LHS / ((prod mu)^{1/2} prod ||g_i||), zero-safe.
inline double localized_ratio(const std::vector<SampledDensity>& gs, double mu_product, double R,
                              double p, double dx, const ExecContext& ctx = {},
                              bool* converged = nullptr) {
  require(mu_product > 0.0, "localized_ratio: mu product must be positive");
  double denom = std::sqrt(mu_product);
  for (const auto& g : gs) denom *= g.l2_norm();
  if (denom <= 0.0) {
    if (converged) *converged = true;
    return 0.0;
  }
  MultilinearOptions opt;
  const auto res = multilinear_lhs(gs, Vec(Vec::Zero(gs.front().patch->ambient_dim)), R, p, dx,
                                   opt, ctx);
  if (converged) *converged = res.converged;
  return res.value / denom;
}

struct LocalizedScalingOptions {
  double dx = 0.5;
  std::uint64_t seed = 0;
  ExecContext ctx{};
};

struct LocalizedScalingReport {
  std::vector<double> mu;
  std::vector<double> ratios;       // per mu, best over trials
  std::vector<int> argmax_trial;
  std::vector<bool> converged;
  double spread = 0.0;              // max ratio / min ratio
  double p = 0.0;                   // 2/(k-1)
};

// Sweeps the mu schedule: every slice-bearing patch is localized at the
// current mu, the rest keep full support, and the ratio is maximized over
// seeded trials. Boundedness of the spread is the experiment's verdict and
// is reported, not asserted.
inline LocalizedScalingReport localized_scaling_check(const SurfaceSystem& sys,
                                                      const LocalizedSupportSpec& spec, double R,
                                                      const std::vector<double>& mu_schedule,
                                                      int trials,
                                                      const LocalizedScalingOptions& opt = {}) {
  sys.validate();
  const int k = sys.k();
  require(k >= 2, "localized_scaling_check: need k >= 2 for a finite exponent 2/(k-1)");
  require(!mu_schedule.empty(), "localized_scaling_check: empty mu schedule");
  require(trials >= 1, "localized_scaling_check: need at least one trial");
  require(spec.normal_wedge > 0.0,
          "localized_scaling_check: normal wedge certificate is not positive");

  int localized = 0;
  for (const auto& s : spec.slices)
    if (s) ++localized;
  require(localized >= 1, "localized_scaling_check: no patch carries a slice");

  std::vector<std::shared_ptr<const SurfacePatch>> patches;
  for (const auto& p : sys.patches) patches.push_back(std::make_shared<const SurfacePatch>(p));

  LocalizedScalingReport rep;
  rep.mu = mu_schedule;
  rep.p = 2.0 / static_cast<double>(k - 1);
  const CounterRng master(opt.seed);

  for (std::size_t mi = 0; mi < mu_schedule.size(); ++mi) {
    LocalizedSupportSpec cur = spec;
    double mu_product = 1.0;
    for (int i = 0; i < k; ++i)
      if (cur.slices[static_cast<std::size_t>(i)]) {
        cur.mu[static_cast<std::size_t>(i)] = mu_schedule[mi];
        mu_product *= mu_schedule[mi];
      }
    double best = -1.0;
    int best_trial = -1;
    bool best_conv = true;
    for (int t = 0; t < trials; ++t) {
      std::vector<SampledDensity> gs;
      for (int i = 0; i < k; ++i) {
        const std::uint64_t s =
            master.stream((static_cast<std::uint64_t>(mi) * 4096 + static_cast<std::uint64_t>(t)) * 64 +
                          static_cast<std::uint64_t>(i))
                .bits(0);
        gs.push_back(generate_localized_density(patches[static_cast<std::size_t>(i)], cur, i, s));
      }
      bool conv = true;
      const double r = localized_ratio(gs, mu_product, R, rep.p, opt.dx, opt.ctx, &conv);
      if (r > best) {
        best = r;
        best_trial = t;
        best_conv = conv;
      }
    }
    rep.ratios.push_back(best);
    rep.argmax_trial.push_back(best_trial);
    rep.converged.push_back(best_conv);
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double r : rep.ratios) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  rep.spread = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace mlr
