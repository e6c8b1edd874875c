#pragma once
// Locates the subset of a patch whose unit normal is nearly orthogonal to a
// given plane H (equivalently nearly contained in the hyperplane complement),
// verifies it concentrates around the exact zero set
//   S' = { xi : <N(xi), e_i> = 0 for every basis vector e_i of H-perp },
// and measures the transversality data of S' needed to trade normal
// localization for spatial localization.

#include <Eigen/QR>
#include <Eigen/SVD>

#include <optional>

#include "mlr/geometry/surface.hpp"
#include "mlr/geometry/wedge.hpp"

namespace mlr {

struct NormalLocalizationResult {
  std::vector<Vec> zero_params;   // deduped parameter points on S'
  std::vector<Vec> zero_points;   // corresponding ambient points
  double c_tilde = 0.0;           // max over near-zero samples of dist(x, S') / mu
  double min_jacobian = 0.0;      // min m-volume of dF rows at accepted zeros
  double max_residual = 0.0;      // max |F| at accepted zeros
  double min_transversality = 0.0;  // min wedge of S'-normal-plane basis with V basis
  std::int64_t near_samples = 0;    // grid samples with |pi_{H-perp} N| <= mu
  std::int64_t seeds = 0;
};

namespace detail {

// Differential of the unit normal in ambient coordinates, one column per
// parameter direction.
inline Mat unit_normal_differential(const SurfacePatch& p, const Vec& xi) {
  const int d = p.dim();
  const Vec g = p.grad_phi(xi);
  const Mat h = p.hess_phi(xi);
  Vec nu = p.lift(-g, 1.0);
  const double w = nu.norm();
  const Vec n = nu / w;
  Mat dn(p.ambient_dim, d);
  for (int j = 0; j < d; ++j) {
    const Vec dnu = p.lift(-h.col(j), 0.0);
    dn.col(j) = (dnu - n * n.dot(dnu)) / w;
  }
  return dn;
}

}  // namespace detail

// h_perp: n x m matrix with orthonormal columns spanning the complement of H.
inline NormalLocalizationResult normal_localization_submanifold(
    const SurfacePatch& patch, const Mat& h_perp, double mu, int seed_res = 24,
    double nu3 = 1e-3, const ExecContext& ctx = {}) {
  (void)ctx;
  const int n = patch.ambient_dim;
  const int d = patch.dim();
  const int m = static_cast<int>(h_perp.cols());
  require(h_perp.rows() == n, "normal_localization: basis rows must match ambient dim");
  require(m >= 1 && m <= d, "normal_localization: need 1 <= codim <= patch dim");
  require((h_perp.transpose() * h_perp - Mat::Identity(m, m)).norm() <= 1e-8,
          "normal_localization: basis columns must be orthonormal");
  require(mu > 0.0, "normal_localization: mu must be positive");
  require(seed_res >= 3, "normal_localization: seed_res too small");

  const auto ff = [&](const Vec& xi) -> Vec { return h_perp.transpose() * patch.unit_normal(xi); };
  const auto jj = [&](const Vec& xi) -> Mat {
    return h_perp.transpose() * detail::unit_normal_differential(patch, xi);
  };

  const double ftol = 1e-10;
  const double slop = 0.05 * patch.domain.diameter();
  // Damped least-norm Newton; returns the landing point or nullopt.
  const auto newton = [&](Vec xi) -> std::optional<Vec> {
    for (int it = 0; it < 60; ++it) {
      const Vec f = ff(xi);
      if (f.norm() <= ftol) {
        if (!patch.domain.contains(xi, 1e-9)) return std::nullopt;
        return xi;
      }
      Eigen::JacobiSVD<Mat> svd(jj(xi), Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-12);
      const Vec step = svd.solve(-f);
      if (!step.allFinite() || step.norm() < 1e-16) return std::nullopt;
      double t = 1.0;
      bool moved = false;
      while (t > 1e-6) {
        const Vec cand = xi + t * step;
        if (patch.domain.contains(cand, slop) && ff(cand).norm() <= (1.0 - 0.25 * t) * f.norm()) {
          xi = cand;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) return std::nullopt;
    }
    return std::nullopt;
  };

  NormalLocalizationResult out;
  const auto seeds = patch.domain.sample_grid(seed_res);
  out.seeds = static_cast<std::int64_t>(seeds.size());
  const double dedup = std::max(1e-12, 0.5 * patch.domain.covering_radius(seed_res));

  std::vector<Vec> zeros;
  for (const auto& s : seeds) {
    const auto z = newton(s);
    if (z) zeros.push_back(*z);
  }
  // Lexicographic greedy dedup keeps the result independent of seed order.
  std::sort(zeros.begin(), zeros.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  for (const auto& z : zeros) {
    bool dup = false;
    for (const auto& kept : out.zero_params)
      if ((kept - z).norm() <= dedup) {
        dup = true;
        break;
      }
    if (!dup) out.zero_params.push_back(z);
  }
  for (const auto& z : out.zero_params) out.zero_points.push_back(patch.embed(z));

  // Nondegeneracy at every located zero.
  out.min_jacobian = out.zero_params.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& z : out.zero_params) {
    const Mat j = jj(z);
    const double vol = std::sqrt(std::max(0.0, (j * j.transpose()).determinant()));
    out.min_jacobian = std::min(out.min_jacobian, vol);
    out.max_residual = std::max(out.max_residual, ff(z).norm());
    if (vol < nu3)
      throw DegenerateGeometry("normal_localization: zero-set Jacobian volume " +
                               std::to_string(vol) + " below threshold " + std::to_string(nu3));
  }
  // A flat patch whose normal lies in H gives F == 0 everywhere: every seed
  // converges in place with a rank-zero Jacobian and is rejected above.

  // Concentration: every sampled point with |F| <= mu must lie within
  // c_tilde * mu of the located zero set.
  double ct = 0.0;
  for (const auto& s : seeds) {
    if (ff(s).norm() > mu) continue;
    ++out.near_samples;
    const Vec x = patch.embed(s);
    double dist = std::numeric_limits<double>::infinity();
    const auto proj = newton(s);
    if (proj) dist = (x - patch.embed(*proj)).norm();
    for (const auto& zp : out.zero_points) dist = std::min(dist, (x - zp).norm());
    ct = std::max(ct, dist / mu);
  }
  out.c_tilde = ct;

  // Transversality of S': the normal plane of S' (dimension m+1) together
  // with the complement V of the projected H-perp directions inside the
  // patch tangent space must span the ambient space.
  out.min_transversality = out.zero_params.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& z : out.zero_params) {
    const Mat j = jj(z);                    // m x d
    Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeFullV);
    const Mat tan_param = svd.matrixV().rightCols(d - m);  // tangent of S' in parameters
    const Mat dS = patch.differential(z);                  // n x d
    Mat tan_amb = dS * tan_param;                          // n x (d-m)
    Mat normal_plane;                                      // n x (m+1)
    {
      Eigen::HouseholderQR<Mat> qr(tan_amb);
      const Mat q = qr.householderQ();
      normal_plane = q.rightCols(n - (d - m));
    }
    const Mat qs = patch.tangent_frame(z);  // n x d orthonormal
    const Mat p = qs.transpose() * h_perp;  // d x m projected directions, in frame coords
    Eigen::JacobiSVD<Mat> psvd(p, Eigen::ComputeFullU);
    int rank = 0;
    const auto& sv = psvd.singularValues();
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-8 * std::max(1.0, sv.size() ? sv[0] : 0.0)) ++rank;
    const Mat v_frame = psvd.matrixU().rightCols(d - rank);
    const Mat v_amb = qs * v_frame;
    Mat joint(n, normal_plane.cols() + v_amb.cols());
    joint << normal_plane, v_amb;
    const double w = (joint.cols() > n) ? 0.0 : wedge_norm(joint);
    out.min_transversality = std::min(out.min_transversality, w);
  }
  return out;
}

}  // namespace mlr
