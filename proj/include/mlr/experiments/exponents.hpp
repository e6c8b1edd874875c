#pragma once
// Lebesgue exponent bookkeeping in exact rational arithmetic.

#include "mlr/rational.hpp"

namespace mlr {

// Critical exponent p(k) = 2(n+k) / (k(n+k-2)) for k transversal pieces in
// R^n under the curvature condition.
inline Rational conjectured_exponent(int n, int k) {
  require(n >= 2, "conjectured_exponent: need n >= 2");
  require(k >= 1 && k <= n, "conjectured_exponent: need 1 <= k <= n");
  return Rational(2 * (n + k), static_cast<std::int64_t>(k) * (n + k - 2));
}

// Exponent 2/(k-1) available without curvature; undefined for k = 1.
inline Rational generic_exponent(int k) {
  require(k >= 2, "generic_exponent: need k >= 2, the k = 1 exponent has no generic analogue");
  return Rational(2, k - 1);
}

}  // namespace mlr
