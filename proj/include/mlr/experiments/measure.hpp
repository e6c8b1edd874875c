#pragma once
// Empirical growth of the best multilinear constant: for each R in the
// schedule, A_emp(R) maximizes ||prod E_i f_i||_{L^p(B_R)} / prod ||f_i||
// over seeded draws from a density family, then a log-log fit estimates the
// growth exponent. Certificates gate the run: a system without positive
// transversality and curvature minima is refused outright.

#include <chrono>
#include <cmath>

#include "mlr/experiments/families.hpp"
#include "mlr/extension/norms.hpp"
#include "mlr/geometry/certificates.hpp"

namespace mlr {

struct ExperimentConfig {
  SurfaceSystem system;
  double p = 2.0;
  std::vector<double> R_schedule;
  int trials = 1;
  std::uint64_t seed = 0;
  // Parameter chain delta << delta0 << delta1, pinned to factor-4 gaps.
  double delta = 0.0125;
  double delta0 = 0.05;
  double delta1 = 0.2;
  double gamma0 = 0.05;
  double density_h = 1.0 / 16.0;  // surface lattice spacing
  double quad_dx = 0.5;           // spatial quadrature spacing
  DensityFamily family = DensityFamily::random_phases;
  int cert_samples = 9;
  std::string out_json, out_csv, out_svg;
  ExecContext ctx{};

  void validate() const {
    system.validate();
    require(p > 0.0, "ExperimentConfig: p must be positive");
    require(trials >= 1, "ExperimentConfig: need at least one trial");
    require(density_h > 0.0 && quad_dx > 0.0, "ExperimentConfig: grid spacings must be positive");
    require(delta > 0.0 && gamma0 > 0.0, "ExperimentConfig: delta and gamma0 must be positive");
    require(delta <= 0.25 * delta0 && 0.25 * delta0 <= delta1 / 16.0,
            "ExperimentConfig: need delta <= delta0/4 <= delta1/16");
    require(cert_samples >= 2, "ExperimentConfig: cert_samples must be at least 2");
    for (double R : R_schedule) require(R > 0.0, "ExperimentConfig: R values must be positive");
  }
};

struct EstimatePoint {
  double R = 0.0;
  double A_emp = 0.0;
  double lhs = 0.0;    // best trial's multilinear norm
  double denom = 0.0;  // product of density norms for that trial
  int argmax_trial = -1;
  std::string description;  // argmax density family draw
  bool converged = true;    // quadrature refinement agreed at the argmax
  double refined = 0.0;
};

struct EstimateReport {
  std::vector<EstimatePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double max_fit_residual = 0.0;
  bool degenerate_fit = false;  // some A_emp vanished; no log-log line exists
  CertificateReport transversality;
  std::vector<CertificateReport> curvature;
  ExperimentConfig config;
  double runtime_seconds = 0.0;  // informational; excluded from artifacts
};

inline EstimateReport measure_A(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.validate();
  for (std::size_t i = 1; i < cfg.R_schedule.size(); ++i)
    require(cfg.R_schedule[i] > cfg.R_schedule[i - 1], "measure_A: R schedule must increase");
  require(!cfg.R_schedule.empty(), "measure_A: empty R schedule");

  EstimateReport rep;
  rep.config = cfg;

  rep.transversality = check_transversality(cfg.system, cfg.cert_samples, cfg.ctx);
  if (rep.transversality.value <= 0.0)
    throw DegenerateGeometry("measure_A: transversality certificate failed, nu = " +
                             std::to_string(rep.transversality.value));
  for (int l = 1; l <= cfg.system.k(); ++l) {
    rep.curvature.push_back(check_curvature_condition(cfg.system, l, cfg.cert_samples, cfg.ctx));
    if (rep.curvature.back().value <= 0.0)
      throw DegenerateGeometry("measure_A: curvature certificate failed at patch " +
                               std::to_string(l) +
                               ", nu1 = " + std::to_string(rep.curvature.back().value));
  }

  std::vector<std::shared_ptr<const SurfacePatch>> patches;
  for (const auto& p : cfg.system.patches)
    patches.push_back(std::make_shared<const SurfacePatch>(p));
  const int k = cfg.system.k();
  const CounterRng master(cfg.seed);
  const Vec origin = Vec::Zero(cfg.system.ambient_dim());

  MultilinearOptions fast;
  fast.refine_check = false;

  for (std::size_t ri = 0; ri < cfg.R_schedule.size(); ++ri) {
    const double R = cfg.R_schedule[ri];
    struct Trial {
      double ratio = -1.0;
      double lhs = 0.0;
      double denom = 0.0;
      std::string desc;
    };
    std::vector<Trial> slots(static_cast<std::size_t>(cfg.trials));
    parallel_chunks(cfg.ctx, cfg.trials, 1, [&](std::int64_t, std::int64_t b, std::int64_t e) {
      const ExecContext inner{1};
      for (std::int64_t t = b; t < e; ++t) {
        Trial& slot = slots[static_cast<std::size_t>(t)];
        std::vector<SampledDensity> fs;
        std::string desc;
        double denom = 1.0;
        for (int i = 0; i < k; ++i) {
          std::string one;
          const auto rng =
              master.stream(family_stream(static_cast<int>(ri), static_cast<int>(t), i));
          fs.push_back(make_family_density(patches[static_cast<std::size_t>(i)], cfg.family,
                                           cfg.density_h, R, rng, static_cast<int>(t), &one));
          denom *= fs.back().l2_norm();
          desc += (i ? " | " : "") + one;
        }
        slot.denom = denom;
        slot.desc = std::move(desc);
        if (denom <= 0.0) {
          slot.ratio = 0.0;
          continue;
        }
        slot.lhs = multilinear_lhs(fs, origin, R, cfg.p, cfg.quad_dx, fast, inner).value;
        slot.ratio = slot.lhs / denom;
      }
    });

    EstimatePoint pt;
    pt.R = R;
    pt.A_emp = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
      const Trial& s = slots[static_cast<std::size_t>(t)];
      if (pt.argmax_trial < 0 || s.ratio > pt.A_emp) {
        pt.A_emp = std::max(0.0, s.ratio);
        pt.lhs = s.lhs;
        pt.denom = s.denom;
        pt.argmax_trial = t;
        pt.description = s.desc;
      }
    }
    // One refined pass at the winner decides the convergence flag.
    if (pt.denom > 0.0 && pt.A_emp > 0.0) {
      std::vector<SampledDensity> fs;
      for (int i = 0; i < k; ++i) {
        const auto rng = master.stream(family_stream(static_cast<int>(ri), pt.argmax_trial, i));
        fs.push_back(make_family_density(patches[static_cast<std::size_t>(i)], cfg.family,
                                         cfg.density_h, R, rng, pt.argmax_trial));
      }
      MultilinearOptions full;
      const auto res = multilinear_lhs(fs, origin, R, cfg.p, cfg.quad_dx, full, cfg.ctx);
      pt.refined = res.refined;
      pt.converged = res.converged;
    }
    rep.points.push_back(std::move(pt));
  }

  // Log-log least squares over the schedule.
  bool fit_ok = rep.points.size() >= 2;
  for (const auto& pt : rep.points) fit_ok = fit_ok && pt.A_emp > 0.0;
  if (fit_ok) {
    const auto m = static_cast<double>(rep.points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& pt : rep.points) {
      const double x = std::log(pt.R), y = std::log(pt.A_emp);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.intercept = (sy - rep.slope * sx) / m;
    for (const auto& pt : rep.points) {
      const double fit = rep.intercept + rep.slope * std::log(pt.R);
      rep.max_fit_residual =
          std::max(rep.max_fit_residual, std::abs(std::log(pt.A_emp) - fit));
    }
  } else {
    rep.degenerate_fit = true;
  }

  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace mlr
