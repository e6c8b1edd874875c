#pragma once
// How tubes interact with an algebraic partition and with a sampled variety:
// the number of cells a tube's core line visits, and a greedy ball cover of
// the part of a variety the tube crosses at a steep angle.
//
// A polynomial of degree d restricted to a line has at most d sign changes,
// so a line meets at most (sum deg Q_s) + 1 cells; the reported bound carries
// a configurable constant on top of that and overrunning it is treated as a
// library bug, not an input error.

#include <set>
#include <vector>

#include "mlr/algebraic/partition.hpp"
#include "mlr/algebraic/variety.hpp"
#include "mlr/wavepackets/tube.hpp"

namespace mlr {

struct IncidenceReport {
  std::vector<int> counts;  // distinct cells met, per tube
  std::vector<std::set<std::vector<int>>> cell_sets;
  int max_count = 0;
  int bound = 0;  // c_inc * (sum of cut degrees + 1)
};

inline IncidenceReport cell_incidence_counts(const std::vector<Tube>& tubes,
                                             const PartitionResult& part,
                                             double step_scale = 1.0, int c_inc = 2) {
  require(step_scale > 0.0, "cell_incidence_counts: step scale must be positive");
  require(c_inc >= 1, "cell_incidence_counts: c_inc must be at least 1");
  require(part.polys.size() == static_cast<std::size_t>(part.S),
          "cell_incidence_counts: partition has inconsistent cut count");
  require(part.shifts.size() == part.polys.size(),
          "cell_incidence_counts: partition missing shifts");
  require(part.S >= 1, "cell_incidence_counts: partition has no cuts");

  int degsum = 0;
  std::vector<double> thr;
  thr.reserve(part.polys.size());
  for (const auto& q : part.polys) {
    require(q.nvars() == part.n, "cell_incidence_counts: cut dimension mismatch");
    degsum += q.degree();
    thr.push_back(1e-9 * q.max_abs_coeff());
  }

  IncidenceReport rep;
  rep.bound = c_inc * (degsum + 1);
  rep.counts.reserve(tubes.size());
  rep.cell_sets.reserve(tubes.size());

  std::vector<int> sig(static_cast<std::size_t>(part.S));
  for (const auto& t : tubes) {
    require(t.patch && t.patch->ambient_dim == part.n,
            "cell_incidence_counts: tube dimension mismatch");
    std::set<std::vector<int>> seen;
    const Vec a = t.anchor();
    const double step = t.core_radius * step_scale;
    const auto K = static_cast<std::int64_t>(std::ceil(2.0 * t.R / step));
    for (std::int64_t k = 0; k <= K; ++k) {
      const double s = std::min(-t.R + static_cast<double>(k) * step, t.R);
      const Vec x = a + s * t.direction;
      bool on_wall = false;
      for (int c = 0; c < part.S && !on_wall; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        const double v = part.polys[cu].eval(x) + part.shifts[cu];
        if (std::abs(v) <= thr[cu])
          on_wall = true;
        else
          sig[cu] = v > 0.0 ? 1 : -1;
      }
      if (!on_wall) seen.insert(sig);
    }
    const int count = static_cast<int>(seen.size());
    if (count > rep.bound)
      throw InternalError("cell_incidence_counts: a core line met " + std::to_string(count) +
                          " cells, over the guaranteed bound " + std::to_string(rep.bound));
    rep.max_count = std::max(rep.max_count, count);
    rep.counts.push_back(count);
    rep.cell_sets.push_back(std::move(seen));
  }
  return rep;
}

struct BallCover {
  std::vector<Vec> centers;
  double radius = 0.0;  // tube radius / alpha
  std::vector<std::size_t> qualifying_indices;
};

// Greedy cover of the samples inside the tube whose tangent space meets the
// tube direction at angle > alpha. Every qualifying sample lands within
// `radius` of some center; the center count is reported, never asserted
// against the D^n heuristic.
inline BallCover tube_variety_ball_cover(const VarietySample& Z, const Tube& t, double alpha) {
  require(alpha > 0.0 && alpha < 1.5, "tube_variety_ball_cover: alpha must be in (0, 1.5)");
  const double need = t.radius / 10.0;
  if (!(Z.spacing <= need))
    throw InvalidInput("tube_variety_ball_cover: sample spacing " + std::to_string(Z.spacing) +
                       " exceeds the required tube radius / 10 = " + std::to_string(need));

  BallCover cover;
  cover.radius = t.radius / alpha;
  for (std::size_t i = 0; i < Z.points.size(); ++i) {
    if (!t.contains(Z.points[i])) continue;
    if (normal_space_angle(Z.frames[i], t.direction) <= alpha) continue;
    cover.qualifying_indices.push_back(i);
    bool covered = false;
    for (const auto& c : cover.centers)
      if ((Z.points[i] - c).norm() <= cover.radius) {
        covered = true;
        break;
      }
    if (!covered) cover.centers.push_back(Z.points[i]);
  }
  return cover;
}

}  // namespace mlr
