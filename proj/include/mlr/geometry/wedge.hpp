#pragma once
// Wedge norms |v_1 ^ ... ^ v_m| via QR: the product |R_11 * ... * R_mm| equals
// the m-volume of the parallelepiped. Stable, and never exceeds the Hadamard
// bound prod |v_i|.

#include <Eigen/Dense>

#include "mlr/base.hpp"
#include "mlr/geometry/domain.hpp"

namespace mlr {

inline double wedge_norm(const Mat& cols) {
  const auto n = cols.rows(), m = cols.cols();
  require(m >= 1, "wedge_norm: need at least one vector");
  if (m > n) return 0.0;
  Eigen::HouseholderQR<Mat> qr(cols);
  const Mat R = qr.matrixQR().topRows(m);
  double v = 1.0;
  for (Eigen::Index i = 0; i < m; ++i) v *= std::abs(R(i, i));
  return v;
}

inline double wedge_norm(const std::vector<Vec>& vs) {
  require(!vs.empty(), "wedge_norm: need at least one vector");
  Mat cols(vs[0].size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) cols.col(static_cast<Eigen::Index>(i)) = vs[i];
  return wedge_norm(cols);
}

// Linear dependence at the documented tolerance 1e-12 * prod norms.
inline bool wedge_dependent(const Mat& cols, double tol = 1e-12) {
  double prod = 1.0;
  for (Eigen::Index i = 0; i < cols.cols(); ++i) prod *= cols.col(i).norm();
  return wedge_norm(cols) <= tol * prod;
}

}  // namespace mlr
