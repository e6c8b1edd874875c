#pragma once
// The spatial cutoff eta_1: even, nonnegative, L^1-normalized, with Fourier
// transform supported in (-1,1). Realized as eta_1 = 2 pi c^2 / \int b^2 with
// c the inverse transform of the plateau bump
//   b(w) = exp(a - a/(1-4w^2)) on |w| < 1/2,  a = edge_sharpness,
// so nonnegativity, the L^1 normalization, and the support bound hold by
// construction (eta1_hat = b*b / \int b^2). A small a keeps b close to a
// boxcar, which makes eta1_hat nearly triangular: the lattice kernel samples
// eta1_hat(t/(2q+1)) then carry as much packet mass as the hard frequency
// support allows, and random packet subsets stay well inside the
// orthogonality bound. The price is a slowly damped ringing tail in eta_1
// (it stays summable: lattice sums of eta_1 are exact for every stretch
// T >= 1/(2 pi), the deviation of truncated sums is set by the tail alone).
//
// Quadrature is composite 8-point Gauss-Legendre on the interior plus
// dyadically graded panels toward the integration endpoints, where the
// Gevrey edge of b varies on every scale. All values carry absolute error
// < 1e-12 (verified in the window test suite against refined quadrature).

#include "mlr/base.hpp"

namespace mlr {

namespace window_detail {

inline constexpr double kGlx[8] = {-0.9602898564975363, -0.7966664774136267,
                                   -0.5255324099163290, -0.1834346424956498,
                                   0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
inline constexpr double kGlw[8] = {0.1012285362903763, 0.2223810344533745,
                                   0.3137066458778873, 0.3626837833783620,
                                   0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};

template <class F>
long double panel(F&& f, double lo, double hi) {
  long double s = 0.0L;
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int g = 0; g < 8; ++g) s += kGlw[g] * static_cast<long double>(f(mid + half * kGlx[g]));
  return s * half;
}

// Uniform panels on the middle 3/4 of [lo, hi], dyadic bisection over the
// outer eighths so the endpoint scales are all resolved.
template <class F>
double integrate(F f, double lo, double hi, int core_panels, int edge_levels = 44) {
  const double margin = 0.125 * (hi - lo);
  long double s = 0.0L;
  const double a = lo + margin, b = hi - margin;
  const double dw = (b - a) / core_panels;
  for (int i = 0; i < core_panels; ++i) s += panel(f, a + i * dw, a + (i + 1) * dw);
  double step = margin;
  for (int j = 0; j < edge_levels; ++j) {
    const double half = step * 0.5;
    s += panel(f, lo + half, lo + step);
    s += panel(f, hi - step, hi - half);
    step = half;
  }
  s += panel(f, lo, lo + step);
  s += panel(f, hi - step, hi);
  return static_cast<double>(s);
}

}  // namespace window_detail

struct PacketWindow {
  static constexpr double edge_sharpness = 0.15;
  // Smallest ratio window_scale / site_spacing with an exact lattice sum.
  static constexpr double min_stretch = 1.0 / (2.0 * M_PI);

  static double bump(double w) {
    const double u = 1.0 - 4.0 * w * w;
    if (u <= 0.0) return 0.0;
    return std::exp(edge_sharpness - edge_sharpness / u);
  }

  // \int_{-1/2}^{1/2} b^2
  static double bump_energy() {
    static const double val = window_detail::integrate(
        [](double w) { return bump(w) * bump(w); }, -0.5, 0.5, 96);
    return val;
  }

  // c(y) = (1/pi) \int_0^{1/2} b(w) cos(wy) dw
  static double transform(double y) {
    const int panels = 64 + static_cast<int>(std::abs(y) / 3.0);
    return window_detail::integrate([y](double w) { return bump(w) * std::cos(w * y); }, 0.0,
                                    0.5, panels) /
           M_PI;
  }

  static double eta1(double y) {
    const double c = transform(y);
    return 2.0 * M_PI * c * c / bump_energy();
  }

  // eta1_hat(u) = (b * b)(u) / \int b^2, supported in (-1, 1), eta1_hat(0)=1.
  static double eta1_hat(double u) {
    u = std::abs(u);
    if (u >= 1.0) return 0.0;
    const double lo = std::max(-0.5, u - 0.5), hi = std::min(0.5, u + 0.5);
    return window_detail::integrate([u](double t) { return bump(t) * bump(u - t); }, lo, hi, 96) /
           bump_energy();
  }
};

}  // namespace mlr
