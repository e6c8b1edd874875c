#pragma once
// Constructive linear-algebra pieces: a unit coefficient vector realizing a
// small combination of nearly dependent unit vectors, and a near-kernel
// eigenvector of a symmetric matrix with tiny determinant.

#include <Eigen/Eigenvalues>

#include "mlr/geometry/wedge.hpp"

namespace mlr {

struct WedgeCombination {
  Vec alpha;        // unit vector of coefficients
  double achieved;  // |sum_i alpha_i v_i|
};

// Given unit vectors with |v_1 ^ ... ^ v_m| <= c^m, produce unit alpha with
// |sum alpha_i v_i| <= c. Induction on m: project the last vector onto the
// span of the rest; if the residual is already <= c, combine, otherwise the
// leading m-1 vectors inherit the hypothesis and the last coefficient is 0.
inline WedgeCombination small_wedge_combination(const std::vector<Vec>& v, double c) {
  require(!v.empty(), "small_wedge_combination: empty input");
  require(c > 0.0 && c <= 1.0, "small_wedge_combination: need 0 < c <= 1");
  const int m = static_cast<int>(v.size());
  const int n = static_cast<int>(v[0].size());
  for (const auto& x : v) {
    require(static_cast<int>(x.size()) == n, "small_wedge_combination: mixed dimensions");
    require(std::abs(x.norm() - 1.0) <= 1e-12, "small_wedge_combination: vectors must be unit");
  }
  {
    Mat cols(n, m);
    for (int i = 0; i < m; ++i) cols.col(i) = v[i];
    const double w = wedge_norm(cols);
    if (w > std::pow(c, m) * (1.0 + 1e-12))
      throw DomainViolation("small_wedge_combination: wedge " + std::to_string(w) +
                            " exceeds c^m = " + std::to_string(std::pow(c, m)));
  }

  int mm = m;
  while (mm > 1) {
    Mat span(n, mm - 1);
    for (int i = 0; i < mm - 1; ++i) span.col(i) = v[static_cast<std::size_t>(i)];
    // Least-norm least-squares keeps beta finite when the span is itself
    // nearly dependent.
    Eigen::JacobiSVD<Mat> svd(span, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const Vec beta = svd.solve(v[static_cast<std::size_t>(mm - 1)]);
    const double resid = (v[static_cast<std::size_t>(mm - 1)] - span * beta).norm();
    if (resid <= c) {
      Vec alpha = Vec::Zero(m);
      for (int i = 0; i < mm - 1; ++i) alpha[i] = -beta[i];
      alpha[mm - 1] = 1.0;
      alpha /= alpha.norm();
      Vec comb = Vec::Zero(n);
      for (int i = 0; i < m; ++i) comb += alpha[i] * v[static_cast<std::size_t>(i)];
      const double achieved = comb.norm();
      require(achieved <= c + 1e-8, "small_wedge_combination: combination bound missed");
      return {alpha, achieved};
    }
    --mm;  // residual > c: the leading block satisfies the hypothesis with the same c
  }
  // mm == 1 is only reachable when c = 1 (a unit vector has wedge 1 <= c).
  Vec alpha = Vec::Zero(m);
  alpha[0] = 1.0;
  return {alpha, 1.0};
}

struct SmallEigvec {
  Vec v;              // unit eigenvector for the least-magnitude eigenvalue
  double eigenvalue;  // the signed eigenvalue
};

// Symmetric A with |det A| <= eps yields a unit v with |Av| <= eps^{1/n}.
inline SmallEigvec small_eigvec(const Mat& a, double eps) {
  require(a.rows() == a.cols() && a.rows() >= 1, "small_eigvec: square matrix required");
  require(eps > 0.0, "small_eigvec: eps must be positive");
  const int n = static_cast<int>(a.rows());
  require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
          "small_eigvec: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  double det = 1.0;
  for (int i = 0; i < n; ++i) det *= eig.eigenvalues()[i];
  if (std::abs(det) > eps * (1.0 + 1e-12))
    throw DomainViolation("small_eigvec: |det| = " + std::to_string(std::abs(det)) +
                          " exceeds eps = " + std::to_string(eps));
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(eig.eigenvalues()[i]) < std::abs(eig.eigenvalues()[best])) best = i;
  SmallEigvec out{eig.eigenvectors().col(best), eig.eigenvalues()[best]};
  require((a * out.v).norm() <= std::pow(eps, 1.0 / n) + 1e-10,
          "small_eigvec: residual bound missed");
  return out;
}

}  // namespace mlr
