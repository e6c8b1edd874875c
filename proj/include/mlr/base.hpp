#pragma once
// Shared runtime pieces: error taxonomy, counter-based RNG, deterministic
// parallel helpers, compensated summation, small numeric utilities.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mlr {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Error taxonomy. InvalidInput maps to CLI exit 2, everything else to exit 1.
// ---------------------------------------------------------------------------

struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& m) : std::runtime_error("invalid-input: " + m) {}
};
struct DomainViolation : std::runtime_error {
  explicit DomainViolation(const std::string& m) : std::runtime_error("domain-error: " + m) {}
};
struct DegenerateGeometry : std::runtime_error {
  explicit DegenerateGeometry(const std::string& m) : std::runtime_error("degenerate-geometry: " + m) {}
};
struct NoSolution : std::runtime_error {
  explicit NoSolution(const std::string& m) : std::runtime_error("no-solution: " + m) {}
};
struct PartitionFailure : std::runtime_error {
  explicit PartitionFailure(const std::string& m) : std::runtime_error("partition-failure: " + m) {}
};
struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& m) : std::runtime_error("internal-error: " + m) {}
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput(msg);
}

// ---------------------------------------------------------------------------
// Hashing and counter-based randomness. All randomness in the project flows
// from one 64-bit seed through pure functions of (seed, stream, counter), so
// results never depend on evaluation order or thread count.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

// splitmix64 finalizer; bijective mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc908ull))) {}

  // Derive an independent stream; order of derivation is part of the name.
  CounterRng stream(std::uint64_t id) const { return CounterRng(state_, id + 1); }
  CounterRng stream(const std::string& name) const { return CounterRng(state_, fnv1a64(name)); }

  std::uint64_t bits(std::uint64_t counter) const { return mix64(state_ ^ mix64(counter * 0x9e3779b97f4a7c15ull + 1)); }

  // Uniform in [0,1): 53 mantissa bits.
  double unit(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * unit(counter);
  }
  // Standard normal via Box-Muller on two decorrelated counters.
  double gaussian(std::uint64_t counter) const {
    double u1 = unit(2 * counter), u2 = unit(2 * counter + 1);
    u1 = std::max(u1, 0x1.0p-60);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  cplx unit_phase(std::uint64_t counter) const {
    const double t = 2.0 * M_PI * unit(counter);
    return {std::cos(t), std::sin(t)};
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Deterministic parallelism. Work is split into chunks whose layout depends
// only on the problem size; worker threads fill disjoint slots and the caller
// combines them in chunk order, so outputs are identical for any thread count.
// ---------------------------------------------------------------------------

struct ExecContext {
  int threads = 1;
};

template <class Fn>
void parallel_chunks(const ExecContext& ctx, std::int64_t total, std::int64_t chunk, Fn&& fn) {
  if (total <= 0) return;
  chunk = std::max<std::int64_t>(1, chunk);
  const std::int64_t nchunks = (total + chunk - 1) / chunk;
  const int threads = std::max(1, ctx.threads);
  if (threads == 1 || nchunks == 1) {
    for (std::int64_t c = 0; c < nchunks; ++c) fn(c, c * chunk, std::min(total, (c + 1) * chunk));
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::int64_t c = t; c < nchunks; c += threads)
          fn(c, c * chunk, std::min(total, (c + 1) * chunk));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Map [0,total) -> double scores, return (min value, lowest index attaining it).
// Deterministic for any thread count; ties resolved toward the lower index.
template <class Score>
std::pair<double, std::int64_t> parallel_argmin(const ExecContext& ctx, std::int64_t total, Score&& score) {
  const std::int64_t chunk = std::max<std::int64_t>(1, total / 256);
  const std::int64_t nchunks = (total + chunk - 1) / chunk;
  std::vector<std::pair<double, std::int64_t>> slot(
      nchunks, {std::numeric_limits<double>::infinity(), -1});
  parallel_chunks(ctx, total, chunk, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    double best = std::numeric_limits<double>::infinity();
    std::int64_t arg = -1;
    for (std::int64_t i = b; i < e; ++i) {
      const double v = score(i);
      if (v < best) { best = v; arg = i; }
    }
    slot[c] = {best, arg};
  });
  std::pair<double, std::int64_t> out{std::numeric_limits<double>::infinity(), -1};
  for (const auto& s : slot)
    if (s.second >= 0 && s.first < out.first) out = s;
  return out;
}

// ---------------------------------------------------------------------------
// Compensated summation (Neumaier). Used wherever mass accumulation has an
// absolute error contract.
// ---------------------------------------------------------------------------

class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Small numeric utilities.
// ---------------------------------------------------------------------------

inline double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

inline std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i);
    r /= static_cast<std::uint64_t>(i);
  }
  return r;
}

// count points, endpoints included when count >= 2.
inline std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(std::max(count, 1)));
  if (count <= 1) { v[0] = lo; return v; }
  for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return v;
}

}  // namespace mlr
