#pragma once
// Grid-certified lower bounds for the two system conditions:
//   transversality:  min |N_1 ^ ... ^ N_k|  over sampled parameter tuples
//   curvature:       min |N_1 ^ ... ^ N_k ^ S_l v|  over tuples and unit v in
//                    the admissible space (tangent to patch l, orthogonal to
//                    every sampled normal)
// The minimum over v is exact per tuple (smallest singular value of the
// projected shape image), only the parameter grids are sampled. A Lipschitz
// slack derived from measured derivative bounds and the grid covering radius
// is reported separately; certified = max(0, value - slack).

#include <optional>

#include "mlr/geometry/shape_operator.hpp"
#include "mlr/geometry/wedge.hpp"

namespace mlr {

struct SurfaceSystem {
  std::vector<SurfacePatch> patches;

  int ambient_dim() const { return patches.empty() ? 0 : patches[0].ambient_dim; }
  int k() const { return static_cast<int>(patches.size()); }

  void validate() const {
    require(!patches.empty(), "SurfaceSystem: need at least one patch");
    for (const auto& p : patches)
      require(p.ambient_dim == patches[0].ambient_dim, "SurfaceSystem: mixed ambient dimensions");
    require(k() <= ambient_dim(), "SurfaceSystem: more patches than ambient dimensions");
  }
};

struct CertificateReport {
  std::string kind;       // "transversality" | "curvature"
  double value = 0.0;     // grid minimum
  double slack = 0.0;     // conservative Lipschitz slack
  double certified = 0.0; // max(0, value - slack)
  std::vector<Vec> argmin;           // parameter point per patch
  int samples_per_dim = 0;
  std::int64_t tuples = 0;
  std::int64_t skipped = 0;          // curvature: tuples with empty admissible space
  int curvature_patch = 0;           // 1-based l for curvature reports
};

namespace detail {

struct PatchSamples {
  std::vector<Vec> params;
  std::vector<Vec> normals;
  double cover = 0.0;      // covering radius of the parameter grid
  double lip_normal = 0.0; // measured sup |dN/dxi| bound: |Hess|(1+|grad|)/W
};

inline PatchSamples sample_patch(const SurfacePatch& p, int m) {
  PatchSamples s;
  s.params = p.domain.sample_grid(m);
  s.normals.reserve(s.params.size());
  double lip = 0.0;
  for (const auto& xi : s.params) {
    s.normals.push_back(p.unit_normal(xi));
    const double g = p.grad_phi(xi).norm();
    const double hn = p.hess_phi(xi).norm();
    lip = std::max(lip, hn * (1.0 + g) / std::sqrt(1.0 + g * g));
  }
  // The sup just measured is a grid estimate; keep the configured bound as a
  // backstop for what happens between samples.
  s.lip_normal = std::min(lip * 1.5, p.deriv_bound * (1.0 + p.deriv_bound));
  s.cover = p.domain.covering_radius(m);
  return s;
}

// sqrt of the Gram determinant of unit columns; cheap path for the hot loop.
template <class Getter>
inline double gram_wedge(int k, int n, Getter&& col) {
  if (k == 1) return col(0).norm();
  if (k == 2) {
    const double d = col(0).dot(col(1));
    return std::sqrt(std::max(0.0, col(0).squaredNorm() * col(1).squaredNorm() - d * d));
  }
  Mat g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) g(i, j) = g(j, i) = col(i).dot(col(j));
  (void)n;
  return std::sqrt(std::max(0.0, g.determinant()));
}

}  // namespace detail

inline CertificateReport check_transversality(const SurfaceSystem& sys, int samples_per_dim,
                                              const ExecContext& ctx = {}) {
  sys.validate();
  require(samples_per_dim >= 2, "check_transversality: samples_per_dim must be >= 2");
  const int k = sys.k();

  std::vector<detail::PatchSamples> ps;
  ps.reserve(k);
  std::vector<std::int64_t> sizes;
  std::int64_t total = 1;
  for (const auto& p : sys.patches) {
    ps.push_back(detail::sample_patch(p, samples_per_dim));
    sizes.push_back(static_cast<std::int64_t>(ps.back().params.size()));
    total *= sizes.back();
    require(total < (std::int64_t{1} << 40), "check_transversality: tuple grid too large");
  }

  auto score = [&](std::int64_t flat) {
    std::int64_t rest = flat;
    const Vec* cols[8];
    for (int i = k - 1; i >= 0; --i) {
      cols[i] = &ps[i].normals[static_cast<std::size_t>(rest % sizes[i])];
      rest /= sizes[i];
    }
    return detail::gram_wedge(k, sys.ambient_dim(), [&](int i) -> const Vec& { return *cols[i]; });
  };
  const auto [minv, argflat] = parallel_argmin(ctx, total, score);

  CertificateReport rep;
  rep.kind = "transversality";
  rep.value = minv;
  rep.samples_per_dim = samples_per_dim;
  rep.tuples = total;
  std::int64_t rest = argflat;
  rep.argmin.resize(k);
  for (int i = k - 1; i >= 0; --i) {
    rep.argmin[i] = ps[i].params[static_cast<std::size_t>(rest % sizes[i])];
    rest /= sizes[i];
  }
  // Each unit normal moves at Lipschitz rate; the wedge is 1-Lipschitz in each
  // unit argument.
  double slack = 0.0;
  for (int i = 0; i < k; ++i) slack += ps[i].lip_normal * ps[i].cover;
  rep.slack = slack;
  rep.certified = std::max(0.0, rep.value - rep.slack);
  return rep;
}

inline CertificateReport check_curvature_condition(const SurfaceSystem& sys, int l_patch,
                                                   int samples_per_dim,
                                                   const ExecContext& ctx = {},
                                                   double rank_tol = 1e-8) {
  sys.validate();
  require(l_patch >= 1 && l_patch <= sys.k(), "check_curvature_condition: patch index out of range");
  require(samples_per_dim >= 2, "check_curvature_condition: samples_per_dim must be >= 2");
  const int k = sys.k();
  const int n = sys.ambient_dim();
  const int d = n - 1;
  const int li = l_patch - 1;

  std::vector<detail::PatchSamples> ps;
  std::vector<std::int64_t> sizes;
  std::int64_t total = 1;
  for (const auto& p : sys.patches) {
    ps.push_back(detail::sample_patch(p, samples_per_dim));
    sizes.push_back(static_cast<std::int64_t>(ps.back().params.size()));
    total *= sizes.back();
    require(total < (std::int64_t{1} << 40), "check_curvature_condition: tuple grid too large");
  }

  // Cache frame and shape matrix on patch l.
  const auto& lp = sys.patches[li];
  std::vector<Mat> frames(ps[li].params.size()), shapes(ps[li].params.size());
  double lip_shape = 0.0;
  for (std::size_t s = 0; s < ps[li].params.size(); ++s) {
    const auto so = shape_operator(lp, ps[li].params[s]);
    frames[s] = so.frame;
    shapes[s] = so.matrix;
    lip_shape = std::max(lip_shape, so.matrix.norm());
  }
  // Shape-matrix motion rate, measured on the grid; the configured derivative
  // bound caps what could hide between samples.
  double lip_shape_motion = 0.0;
  {
    const double eps = 1e-4 * std::max(1e-6, lp.domain.diameter());
    for (std::size_t s = 0; s < ps[li].params.size(); ++s) {
      for (int j = 0; j < d; ++j) {
        Vec probe = ps[li].params[s];
        probe[j] += (lp.domain.contains(probe + Vec::Unit(d, j) * eps, 0.0) ? eps : -eps);
        if (!lp.domain.contains(probe, 0.0)) continue;
        const auto so2 = shape_operator(lp, probe);
        lip_shape_motion = std::max(
            lip_shape_motion, (so2.matrix - shapes[s]).norm() / eps);
      }
    }
    lip_shape_motion = std::min(1.5 * lip_shape_motion,
                                lp.deriv_bound * (1.0 + lp.deriv_bound) * (1.0 + lp.deriv_bound));
  }

  std::vector<std::int64_t> skipped_per_chunk;
  const std::int64_t chunk = std::max<std::int64_t>(1, total / 256);
  const std::int64_t nchunks = (total + chunk - 1) / chunk;
  skipped_per_chunk.assign(static_cast<std::size_t>(nchunks), 0);
  std::vector<std::pair<double, std::int64_t>> slot(
      static_cast<std::size_t>(nchunks), {std::numeric_limits<double>::infinity(), -1});

  parallel_chunks(ctx, total, chunk, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    Mat proj(k, d);           // sampled normals expressed in the frame of patch l
    Mat shape_img(n, d);      // ambient images of admissible directions under S
    double best = std::numeric_limits<double>::infinity();
    std::int64_t arg = -1;
    std::int64_t skipped = 0;
    std::vector<const Vec*> normals(k);
    for (std::int64_t flat = b; flat < e; ++flat) {
      std::int64_t rest = flat;
      std::size_t l_sample = 0;
      for (int i = k - 1; i >= 0; --i) {
        const auto s = static_cast<std::size_t>(rest % sizes[i]);
        rest /= sizes[i];
        normals[i] = &ps[i].normals[s];
        if (i == li) l_sample = s;
      }
      const Mat& Q = frames[l_sample];
      for (int i = 0; i < k; ++i) proj.row(i) = (Q.transpose() * (*normals[i])).transpose();

      // Admissible directions: null space of the projected normals.
      Eigen::JacobiSVD<Mat> svd(proj, Eigen::ComputeFullV);
      int rank = 0;
      const double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > rank_tol * std::max(1.0, smax)) ++rank;
      const int dv = d - rank;
      if (dv <= 0) {
        ++skipped;
        continue;
      }
      const Mat B = svd.matrixV().rightCols(dv);

      const double wn = detail::gram_wedge(k, n, [&](int i) -> const Vec& { return *normals[i]; });

      // |N_1 ^ ... ^ N_k ^ z| = wn * |z projected off span(N_i)|, so the exact
      // minimum over unit admissible v is wn * sigma_min of the projected image.
      shape_img.resize(n, dv);
      shape_img = Q * (shapes[l_sample] * B);
      // Orthonormalize the normals and project their span out.
      Mat nb(n, k);
      for (int i = 0; i < k; ++i) nb.col(i) = *normals[i];
      Eigen::HouseholderQR<Mat> qr(nb);
      Mat on = qr.householderQ() * Mat::Identity(n, std::min(k, n));
      shape_img -= on * (on.transpose() * shape_img);
      Eigen::JacobiSVD<Mat> svd2(shape_img);
      const double smin = svd2.singularValues()[svd2.singularValues().size() - 1];
      const double v = wn * smin;
      if (v < best) {
        best = v;
        arg = flat;
      }
    }
    slot[static_cast<std::size_t>(c)] = {best, arg};
    skipped_per_chunk[static_cast<std::size_t>(c)] = skipped;
  });

  CertificateReport rep;
  rep.kind = "curvature";
  rep.curvature_patch = l_patch;
  rep.samples_per_dim = samples_per_dim;
  rep.tuples = total;
  std::pair<double, std::int64_t> bestp{std::numeric_limits<double>::infinity(), -1};
  for (const auto& s : slot)
    if (s.second >= 0 && s.first < bestp.first) bestp = s;
  for (auto s : skipped_per_chunk) rep.skipped += s;
  if (bestp.second < 0) {
    // Every tuple was rank-deficient; nothing to certify.
    rep.value = 0.0;
    rep.slack = 0.0;
    rep.certified = 0.0;
    return rep;
  }
  rep.value = bestp.first;
  std::int64_t rest = bestp.second;
  rep.argmin.resize(k);
  for (int i = k - 1; i >= 0; --i) {
    rep.argmin[i] = ps[i].params[static_cast<std::size_t>(rest % sizes[i])];
    rest /= sizes[i];
  }
  double slack = 0.0;
  for (int i = 0; i < k; ++i)
    slack += ps[i].lip_normal * ps[i].cover * (1.0 + (i == li ? 0.0 : lip_shape));
  slack += lip_shape_motion * ps[li].cover;
  rep.slack = slack;
  rep.certified = std::max(0.0, rep.value - rep.slack);
  return rep;
}

}  // namespace mlr
