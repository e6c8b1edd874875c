#pragma once
// Shape operator of a graph patch in an orthonormal tangent frame, derived
// from the first and second fundamental forms. Sign convention: S = -d(Gauss
// map), so the unit paraboloid at the origin yields +Identity.

#include <Eigen/Dense>

#include "mlr/geometry/surface.hpp"

namespace mlr {

struct ShapeOperator {
  Mat frame;   // n x (n-1) orthonormal basis of the tangent space
  Mat matrix;  // (n-1) x (n-1) symmetric matrix of S in that frame
  Vec eigenvalues;   // ascending (principal curvatures)
  Mat eigenvectors;  // frame coordinates, columns match eigenvalues

  // S applied to an ambient tangent vector (components off the tangent space
  // are projected away first).
  Vec apply(const Vec& v) const { return frame * (matrix * (frame.transpose() * v)); }

  // Ambient principal directions.
  Mat principal_directions() const { return frame * eigenvectors; }
};

inline ShapeOperator shape_operator(const SurfacePatch& patch, const Vec& xi) {
  require(xi.size() == patch.dim(), "shape_operator: parameter dimension mismatch");
  const int d = patch.dim();
  const Mat J = patch.differential(xi);
  Eigen::HouseholderQR<Mat> qr(J);
  Mat Q = qr.householderQ() * Mat::Identity(patch.ambient_dim, d);
  Mat R = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    if (R(c, c) < 0) {
      R.row(c) = -R.row(c);
      Q.col(c) = -Q.col(c);
    }
  }

  const double w = std::sqrt(1.0 + patch.grad_phi(xi).squaredNorm());
  const Mat second = patch.hess_phi(xi) / w;  // second fundamental form in graph coordinates

  // M = R^{-T} * second * R^{-1}: the frame matrix of S.
  const Mat tmp = R.transpose().triangularView<Eigen::Lower>().solve(second);
  Mat M = R.transpose().triangularView<Eigen::Lower>().solve(tmp.transpose()).transpose();
  M = 0.5 * (M + M.transpose());

  ShapeOperator out;
  out.frame = Q;
  out.matrix = M;
  Eigen::SelfAdjointEigenSolver<Mat> eig(M);
  out.eigenvalues = eig.eigenvalues();
  out.eigenvectors = eig.eigenvectors();
  return out;
}

}  // namespace mlr
