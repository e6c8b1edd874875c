#pragma once
// Structured density families for lower-bounding the best constant A(R).
// Each draw is a pure function of (rng state, trial), so runs reproduce
// bit for bit and enlarging a trial set never disturbs earlier draws.

#include <string>

#include "mlr/extension/density.hpp"

namespace mlr {

enum class DensityFamily { random_phases, focusing, packet_sparse, zero };

inline const char* family_name(DensityFamily f) {
  switch (f) {
    case DensityFamily::random_phases: return "random_phases";
    case DensityFamily::focusing: return "focusing";
    case DensityFamily::packet_sparse: return "packet_sparse";
    case DensityFamily::zero: return "zero";
  }
  return "?";
}

inline DensityFamily parse_family(const std::string& s) {
  if (s == "random_phases") return DensityFamily::random_phases;
  if (s == "focusing") return DensityFamily::focusing;
  if (s == "packet_sparse") return DensityFamily::packet_sparse;
  if (s == "zero") return DensityFamily::zero;
  throw InvalidInput("unknown density family \"" + s + "\"");
}

// Stream id for the draw of patch i in trial t at R-schedule slot ri; shared
// with tests and tools so any reported draw can be rebuilt.
inline std::uint64_t family_stream(int r_index, int trial, int patch_index) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(r_index)) << 32) ^
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(trial)) << 8) ^
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(patch_index));
}

// One density draw. Amplitudes are filled in lattice odometer order with
// rng counters tied to the node position, then L^2-normalized (except the
// zero family). Trial 0 of the focusing family aims at the origin; later
// trials draw the focal point from [-R/2, R/2]^n.
inline SampledDensity make_family_density(std::shared_ptr<const SurfacePatch> patch,
                                          DensityFamily family, double h, double R,
                                          const CounterRng& rng, int trial,
                                          std::string* description = nullptr) {
  require(patch != nullptr, "make_family_density: null patch");
  require(R > 0.0, "make_family_density: R must be positive");
  SampledDensity f =
      SampledDensity::sample(patch, h, [](const Vec&) { return cplx{1.0, 0.0}; });
  const int n = patch->ambient_dim;
  std::string desc = family_name(family);

  switch (family) {
    case DensityFamily::random_phases: {
      for (std::size_t j = 0; j < f.size(); ++j) {
        const double th = 2.0 * M_PI * rng.unit(j);
        f.amp[j] = cplx{std::cos(th), std::sin(th)};
      }
      break;
    }
    case DensityFamily::focusing: {
      Vec x0 = Vec::Zero(n);
      if (trial != 0)
        for (int a = 0; a < n; ++a)
          x0[a] = rng.uniform(1000000 + static_cast<std::uint64_t>(a), -0.5 * R, 0.5 * R);
      for (std::size_t j = 0; j < f.size(); ++j) {
        const double ph = -x0.dot(patch->embed(f.node_xi(j)));
        f.amp[j] = cplx{std::cos(ph), std::sin(ph)};
      }
      desc += " at x0 = (";
      for (int a = 0; a < n; ++a) desc += (a ? ", " : "") + std::to_string(x0[a]);
      desc += ")";
      break;
    }
    case DensityFamily::packet_sparse: {
      const auto center =
          static_cast<std::size_t>(rng.unit(2000000) * static_cast<double>(f.size()));
      const Vec xi0 = f.node_xi(std::min(center, f.size() - 1));
      const double half = 0.5 / std::sqrt(R);
      std::size_t kept = 0;
      for (std::size_t j = 0; j < f.size(); ++j) {
        if ((f.node_xi(j) - xi0).lpNorm<Eigen::Infinity>() <= half + 1e-12) {
          const double th = 2.0 * M_PI * rng.unit(j);
          f.amp[j] = cplx{std::cos(th), std::sin(th)};
          ++kept;
        } else {
          f.amp[j] = cplx{0.0, 0.0};
        }
      }
      desc += " cell at (";
      for (int a = 0; a < patch->dim(); ++a) desc += (a ? ", " : "") + std::to_string(xi0[a]);
      desc += "), " + std::to_string(kept) + " nodes";
      break;
    }
    case DensityFamily::zero: {
      for (auto& a : f.amp) a = cplx{0.0, 0.0};
      break;
    }
  }
  if (family != DensityFamily::zero) f = f.normalized();
  if (description) *description = desc;
  return f;
}

}  // namespace mlr
