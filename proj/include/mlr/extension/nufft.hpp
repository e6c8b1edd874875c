#pragma once
// Type-1 nonuniform FFT with a truncated periodized Gaussian spreading
// kernel: sources are folded into [-pi,pi)^n, spread onto an oversampled
// fine grid, transformed with FFTW, and deconvolved in frequency. Parameters
// (oversampling >= 2, 10-point half-width, beta = 1) put both the truncation
// and aliasing errors below 1e-8 relative, comfortably inside the 1e-6
// agreement contract with the direct evaluator.

#include <fftw3.h>

#include <mutex>

#include "mlr/extension/grid.hpp"

namespace mlr {

namespace detail {

inline int smooth_size(int lo) {
  for (int s = lo;; ++s) {
    int r = s;
    for (int f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return s;
  }
}

inline std::int64_t nufft_fine_total(const EvaluationGrid& grid) {
  const int nf = smooth_size(2 * grid.per_dim());
  std::int64_t t = 1;
  for (int i = 0; i < grid.dim(); ++i) t *= nf;
  return t;
}

struct SpreadSources {
  Mat theta;               // n x J grid-step phases dx * omega_j
  std::vector<cplx> coef;  // h^{n-1} amp_j exp(i center . omega_j)
};

inline SpreadSources prepare_spread_sources(const SampledDensity& f, const EvaluationGrid& grid) {
  SpreadSources s;
  const int n = grid.dim();
  const auto J = f.size();
  s.theta.resize(n, static_cast<Eigen::Index>(J));
  s.coef.resize(J);
  const double w = std::pow(f.h, f.dim());
  for (std::size_t j = 0; j < J; ++j) {
    const Vec om = f.patch->embed(f.node_xi(j));
    s.theta.col(static_cast<Eigen::Index>(j)) = grid.dx * om;
    const double ph = grid.center.dot(om);
    s.coef[j] = w * f.amp[j] * cplx{std::cos(ph), std::sin(ph)};
  }
  return s;
}

}  // namespace detail

inline bool nufft_fine_grid_fits(const EvaluationGrid& grid, std::int64_t budget_bytes = 220000000) {
  return detail::nufft_fine_total(grid) * 16 <= budget_bytes;
}

inline Field evaluate_nufft(const SampledDensity& f, const EvaluationGrid& grid,
                            const ExecContext& ctx = {}) {
  const int n = grid.dim();
  require(n >= 1 && n <= 4, "evaluate_nufft: supported ambient dimensions are 1..4");
  require(nufft_fine_grid_fits(grid), "evaluate_nufft: fine grid exceeds the memory budget");
  const auto src = detail::prepare_spread_sources(f, grid);

  const int nf = detail::smooth_size(2 * grid.per_dim());
  const double gamma = 2.0 * M_PI / nf;
  const double beta = 1.0;
  const double tau = beta * gamma * gamma;
  const int w = 10;

  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= nf;
  std::vector<cplx> fine(static_cast<std::size_t>(total), cplx{0.0, 0.0});

  // Spread: single-threaded scatter keeps the accumulation order fixed.
  const auto J = static_cast<std::int64_t>(f.size());
  std::vector<double> wts(static_cast<std::size_t>(n * (2 * w + 1)));
  std::vector<int> base(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < J; ++j) {
    for (int d = 0; d < n; ++d) {
      double th = src.theta(d, j);
      th -= 2.0 * M_PI * std::round(th / (2.0 * M_PI));  // fold to [-pi, pi)
      const int m0 = static_cast<int>(std::lround(th / gamma));
      base[static_cast<std::size_t>(d)] = m0;
      for (int o = -w; o <= w; ++o) {
        const double dist = th - gamma * (m0 + o);
        wts[static_cast<std::size_t>(d * (2 * w + 1) + o + w)] = std::exp(-dist * dist / (4.0 * tau));
      }
    }
    const cplx c = src.coef[static_cast<std::size_t>(j)];
    // Tensor scatter over the (2w+1)^n window.
    std::vector<int> off(static_cast<std::size_t>(n), -w);
    while (true) {
      double wt = 1.0;
      std::int64_t flat = 0;
      for (int d = 0; d < n; ++d) {
        wt *= wts[static_cast<std::size_t>(d * (2 * w + 1) + off[static_cast<std::size_t>(d)] + w)];
        const int m = ((base[static_cast<std::size_t>(d)] + off[static_cast<std::size_t>(d)]) % nf + nf) % nf;
        flat = flat * nf + m;
      }
      fine[static_cast<std::size_t>(flat)] += wt * c;
      int d = n - 1;
      while (d >= 0 && ++off[static_cast<std::size_t>(d)] > w) off[static_cast<std::size_t>(d--)] = -w;
      if (d < 0) break;
    }
  }

  // FFTW plans are not thread-safe to create; execution is single-threaded.
  {
    static std::mutex fftw_mutex;
    std::vector<int> dims(static_cast<std::size_t>(n), nf);
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_mutex);
      plan = fftw_plan_dft(n, dims.data(), reinterpret_cast<fftw_complex*>(fine.data()),
                           reinterpret_cast<fftw_complex*>(fine.data()), FFTW_BACKWARD,
                           FFTW_ESTIMATE);
    }
    require(plan != nullptr, "evaluate_nufft: FFTW plan creation failed");
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(fftw_mutex);
      fftw_destroy_plan(plan);
    }
  }

  // Deconvolve and gather the centered output block.
  const int P = grid.per_dim();
  std::vector<double> corr(static_cast<std::size_t>(P));
  const double c0 = 2.0 * M_PI / (nf * std::sqrt(4.0 * M_PI * tau));
  for (int k = -grid.M; k <= grid.M; ++k)
    corr[static_cast<std::size_t>(k + grid.M)] = c0 * std::exp(tau * k * k);

  Field out;
  out.grid = grid;
  out.values.assign(static_cast<std::size_t>(grid.total()), cplx{0.0, 0.0});
  parallel_chunks(ctx, grid.total(), std::max<std::int64_t>(1, grid.total() / 64),
                  [&](std::int64_t, std::int64_t b, std::int64_t e) {
                    Eigen::VectorXi k(n);
                    for (std::int64_t i = b; i < e; ++i) {
                      grid.decode(i, k);
                      std::int64_t flat = 0;
                      double cr = 1.0;
                      for (int d = 0; d < n; ++d) {
                        flat = flat * nf + ((k[d] % nf + nf) % nf);
                        cr *= corr[static_cast<std::size_t>(k[d] + grid.M)];
                      }
                      out.values[static_cast<std::size_t>(i)] =
                          cr * fine[static_cast<std::size_t>(flat)];
                    }
                  });
  return out;
}

}  // namespace mlr
