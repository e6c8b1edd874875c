#pragma once
// Discrete ham sandwich cuts and the iterated cell partition built on them.
//
// A degree-d polynomial has binom(d+n,n)-1 coefficients beyond the constant,
// so it can bisect up to that many weighted clouds at once. The cut search
// runs per start as a homotopy: Levenberg-Marquardt on tanh-smoothed side
// counts with the smoothing width annealed down, then a hard-count random
// polish. Starts are independent and the best one wins deterministically
// (lowest imbalance, ties to the lower start index). The returned side masses
// are recounted from the normalized polynomial, never read off the optimizer.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mlr/geometry/domain.hpp"
#include "mlr/polynomial.hpp"

namespace mlr {

struct WeightedCloud {
  std::vector<Vec> points;
  std::vector<double> weights;
};

struct HamSandwichOptions {
  double tau = 0.05;  // accept when every cloud keeps (1/2 - tau) of its mass per side
  int starts = 10;
  int lm_iters = 10;  // per annealing level
  int polish_iters = 420;
  std::uint64_t seed = 0;
  ExecContext ctx{};
};

struct HamSandwichCut {
  Polynomial poly;               // max |coeff| = 1, first stored term positive
  double worst_imbalance = 1.0;  // max_j (W_j - 2 min(pos_j, neg_j)) / W_j
  std::vector<double> pos_mass, neg_mass;
};

namespace partition_detail {

inline void compositions(int n, int g, std::vector<int>& cur, int pos,
                         std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = g;
    out.push_back(cur);
    return;
  }
  for (int v = g; v >= 0; --v) {
    cur[static_cast<std::size_t>(pos)] = v;
    compositions(n, g - v, cur, pos + 1, out);
  }
}

// Exponent vectors of total degree <= d, graded, constant first.
inline std::vector<std::vector<int>> monomials_up_to(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  for (int g = 0; g <= d; ++g) compositions(n, g, cur, 0, out);
  return out;
}

// Point data in optimizer coordinates: monomial features of the affinely
// standardized points, each feature column brought to unit RMS.
struct CutProblem {
  Mat F;                      // N x L1 normalized features, column 0 constant
  std::vector<double> scale;  // per-column RMS (1 for dead columns)
  std::vector<bool> dead;     // identically zero feature columns
  std::vector<std::vector<int>> exps;
  Vec mu, sigma;              // coordinate standardization
  std::vector<int> cloud_of;  // per row
  Vec w;                      // per row
  std::vector<double> W;      // per cloud
  int j = 0, n = 0;
};

inline CutProblem build_cut_problem(const std::vector<WeightedCloud>& clouds, int degree) {
  CutProblem P;
  P.j = static_cast<int>(clouds.size());
  P.n = static_cast<int>(clouds[0].points.at(0).size());
  std::int64_t N = 0;
  for (const auto& c : clouds) {
    require(c.points.size() == c.weights.size(),
            "ham_sandwich_cut: cloud points/weights size mismatch");
    require(!c.points.empty(), "ham_sandwich_cut: empty cloud");
    N += static_cast<std::int64_t>(c.points.size());
  }

  P.cloud_of.reserve(static_cast<std::size_t>(N));
  P.w.resize(N);
  P.W.assign(static_cast<std::size_t>(P.j), 0.0);
  Mat X(N, P.n);
  std::int64_t row = 0;
  for (int j = 0; j < P.j; ++j)
    for (std::size_t k = 0; k < clouds[static_cast<std::size_t>(j)].points.size(); ++k) {
      const Vec& x = clouds[static_cast<std::size_t>(j)].points[k];
      require(static_cast<int>(x.size()) == P.n, "ham_sandwich_cut: point dimension mismatch");
      const double wt = clouds[static_cast<std::size_t>(j)].weights[k];
      require(wt >= 0.0, "ham_sandwich_cut: negative weight");
      X.row(row) = x.transpose();
      P.w[row] = wt;
      P.cloud_of.push_back(j);
      P.W[static_cast<std::size_t>(j)] += wt;
      ++row;
    }
  for (int j = 0; j < P.j; ++j)
    require(P.W[static_cast<std::size_t>(j)] > 0.0, "ham_sandwich_cut: cloud with zero total mass");

  P.mu = X.colwise().mean().transpose();
  P.sigma.resize(P.n);
  for (int i = 0; i < P.n; ++i) {
    const double var = (X.col(i).array() - P.mu[i]).square().mean();
    P.sigma[i] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  P.exps = monomials_up_to(P.n, degree);
  const auto L1 = static_cast<Eigen::Index>(P.exps.size());
  P.F.resize(N, L1);
  for (std::int64_t i = 0; i < N; ++i) {
    for (Eigen::Index l = 0; l < L1; ++l) {
      double v = 1.0;
      for (int a = 0; a < P.n; ++a) {
        const double u = (X(i, a) - P.mu[a]) / P.sigma[a];
        for (int e = 0; e < P.exps[static_cast<std::size_t>(l)][static_cast<std::size_t>(a)]; ++e)
          v *= u;
      }
      P.F(i, l) = v;
    }
  }
  P.scale.assign(static_cast<std::size_t>(L1), 1.0);
  P.dead.assign(static_cast<std::size_t>(L1), false);
  for (Eigen::Index l = 0; l < L1; ++l) {
    const double rms = std::sqrt(P.F.col(l).array().square().mean());
    if (rms > 0.0) {
      P.scale[static_cast<std::size_t>(l)] = rms;
      P.F.col(l) /= rms;
    } else {
      P.dead[static_cast<std::size_t>(l)] = true;
    }
  }
  return P;
}

// max_j (W_j - 2 min(pos_j, neg_j)) / W_j from hard signs of q.
inline double hard_imbalance(const CutProblem& P, const Vec& q, std::vector<double>& pos,
                             std::vector<double>& neg) {
  pos.assign(static_cast<std::size_t>(P.j), 0.0);
  neg.assign(static_cast<std::size_t>(P.j), 0.0);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const auto c = static_cast<std::size_t>(P.cloud_of[static_cast<std::size_t>(i)]);
    if (q[i] > 0.0)
      pos[c] += P.w[i];
    else if (q[i] < 0.0)
      neg[c] += P.w[i];
  }
  double worst = 0.0;
  for (int j = 0; j < P.j; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    worst = std::max(worst, (P.W[ju] - 2.0 * std::min(pos[ju], neg[ju])) / P.W[ju]);
  }
  return worst;
}

struct StartResult {
  double f = std::numeric_limits<double>::infinity();
  Vec coeffs;
};

inline StartResult optimize_start(const CutProblem& P, const HamSandwichOptions& opts,
                                  std::uint64_t start) {
  const CounterRng rng = CounterRng(opts.seed).stream(start);
  const Eigen::Index L1 = P.F.cols();
  const Eigen::Index N = P.F.rows();

  Vec c(L1);
  for (Eigen::Index l = 0; l < L1; ++l) c[l] = 0.5 * rng.gaussian(static_cast<std::uint64_t>(l));
  Vec q = P.F * c;
  c[0] -= q.dot(P.w) / P.w.sum();  // center the smooth cut on the mass
  q = P.F * c;

  Vec h(P.j), S(P.j), Snew(P.j);
  Mat J(P.j, L1);

  const auto residual = [&](const Vec& qq, const Vec& hh, Vec& out) {
    out.setZero();
    for (Eigen::Index i = 0; i < N; ++i) {
      const int cj = P.cloud_of[static_cast<std::size_t>(i)];
      out[cj] += P.w[i] * std::tanh(qq[i] / hh[cj]) / P.W[static_cast<std::size_t>(cj)];
    }
  };

  const double kappas[] = {1.0, 0.55, 0.3, 0.17, 0.09, 0.05, 0.028, 0.015};
  double lambda = 1e-3;
  for (const double kappa : kappas) {
    for (int it = 0; it < opts.lm_iters; ++it) {
      // Smoothing width per cloud from the current spread of q over it.
      std::vector<double> ms(static_cast<std::size_t>(P.j), 0.0);
      for (Eigen::Index i = 0; i < N; ++i) {
        const auto cj = static_cast<std::size_t>(P.cloud_of[static_cast<std::size_t>(i)]);
        ms[cj] += P.w[i] * q[i] * q[i];
      }
      for (int j = 0; j < P.j; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        h[j] = std::max(kappa * std::sqrt(ms[ju] / P.W[ju]), 1e-30);
      }

      // Residual and Jacobian in one pass.
      S.setZero();
      J.setZero();
      for (Eigen::Index i = 0; i < N; ++i) {
        const int cj = P.cloud_of[static_cast<std::size_t>(i)];
        const double t = std::tanh(q[i] / h[cj]);
        const double Wj = P.W[static_cast<std::size_t>(cj)];
        S[cj] += P.w[i] * t / Wj;
        J.row(cj) += (P.w[i] * (1.0 - t * t) / (Wj * h[cj])) * P.F.row(i);
      }
      const double phi = S.squaredNorm();
      if (phi < 1e-26) break;

      const Mat A = J * J.transpose();
      bool moved = false;
      for (int attempt = 0; attempt < 6; ++attempt) {
        Mat M = A;
        M.diagonal() += lambda * A.diagonal();
        M.diagonal().array() += 1e-300;
        const Vec y = M.ldlt().solve(S);
        const Vec d = J.transpose() * y;
        if (!d.allFinite()) {
          lambda *= 8.0;
          continue;
        }
        const Vec cand = c - d;
        const Vec qc = P.F * cand;
        residual(qc, h, Snew);
        if (Snew.squaredNorm() < phi) {
          c = cand;
          q = qc;
          lambda = std::max(lambda * 0.35, 1e-12);
          moved = true;
          break;
        }
        lambda *= 8.0;
      }
      if (!moved) break;
    }
  }

  // Hard-count polish: annealed random steps, accept on <= so the walk can
  // drift across count plateaus, track the strict best separately.
  std::vector<double> pos, neg;
  StartResult res;
  res.coeffs = c;
  res.f = hard_imbalance(P, q, pos, neg);
  Vec cur = c;
  double cur_f = res.f;
  const double cscale = std::max(cur.norm() / std::sqrt(static_cast<double>(L1)), 1e-3);
  const int PI = std::max(1, opts.polish_iters);
  Vec cand(L1);
  for (int p = 0; p < PI && res.f > 0.0; ++p) {
    const double sig =
        0.25 * std::pow(4e-3, static_cast<double>(p) / std::max(1, PI - 1)) * cscale;
    for (Eigen::Index l = 0; l < L1; ++l)
      cand[l] = cur[l] + sig * rng.gaussian(1000000 + static_cast<std::uint64_t>(p) *
                                                          static_cast<std::uint64_t>(L1) +
                                            static_cast<std::uint64_t>(l));
    const Vec qc = P.F * cand;
    const double f = hard_imbalance(P, qc, pos, neg);
    if (f <= cur_f) {
      cur = cand;
      cur_f = f;
      if (f < res.f) {
        res.f = f;
        res.coeffs = cand;
      }
    }
  }
  return res;
}

}  // namespace partition_detail

inline HamSandwichCut ham_sandwich_cut(const std::vector<WeightedCloud>& clouds, int degree,
                                       const HamSandwichOptions& opts = {}) {
  require(!clouds.empty(), "ham_sandwich_cut: needs at least one cloud");
  require(degree >= 1, "ham_sandwich_cut: degree must be at least 1");
  require(!clouds[0].points.empty(), "ham_sandwich_cut: empty cloud");
  const int n = static_cast<int>(clouds[0].points[0].size());
  const std::uint64_t lift = binom(degree + n, n) - 1;
  require(lift >= clouds.size(),
          "ham_sandwich_cut: a degree " + std::to_string(degree) + " polynomial in " +
              std::to_string(n) + " variables has " + std::to_string(lift) +
              " free coefficients, fewer than the " + std::to_string(clouds.size()) + " masses");

  const auto P = partition_detail::build_cut_problem(clouds, degree);

  const int starts = std::max(1, opts.starts);
  std::vector<partition_detail::StartResult> results(static_cast<std::size_t>(starts));
  parallel_chunks(opts.ctx, starts, 1, [&](std::int64_t, std::int64_t b, std::int64_t e) {
    for (std::int64_t k = b; k < e; ++k)
      results[static_cast<std::size_t>(k)] =
          partition_detail::optimize_start(P, opts, static_cast<std::uint64_t>(k));
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k)
    if (results[k].f < results[best].f) best = k;

  // Map back through the standardization and normalize the coefficients.
  const auto L1 = static_cast<std::size_t>(P.F.cols());
  std::vector<std::vector<Polynomial>> axis_pow(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    auto& pows = axis_pow[static_cast<std::size_t>(a)];
    pows.push_back(Polynomial::constant(n, 1.0));
    const Polynomial base =
        Polynomial::linear(n, a, 1.0 / P.sigma[a]) + Polynomial::constant(n, -P.mu[a] / P.sigma[a]);
    for (int e = 1; e <= degree; ++e) pows.push_back(pows.back() * base);
  }
  Polynomial poly(n);
  for (std::size_t l = 0; l < L1; ++l) {
    if (P.dead[l]) continue;
    const double cl = results[best].coeffs[static_cast<Eigen::Index>(l)] / P.scale[l];
    if (cl == 0.0) continue;
    Polynomial term = Polynomial::constant(n, cl);
    for (int a = 0; a < n; ++a) {
      const int e = P.exps[l][static_cast<std::size_t>(a)];
      if (e > 0) term = term * axis_pow[static_cast<std::size_t>(a)][static_cast<std::size_t>(e)];
    }
    poly = poly + term;
  }
  const double mc = poly.max_abs_coeff();
  if (mc > 0.0) {
    poly = poly.scaled(1.0 / mc);
    if (poly.terms()[0].coeff < 0.0) poly = poly.scaled(-1.0);
  }

  // The contract values: recounted sides of the polynomial actually returned.
  HamSandwichCut cut;
  cut.poly = std::move(poly);
  cut.pos_mass.assign(clouds.size(), 0.0);
  cut.neg_mass.assign(clouds.size(), 0.0);
  for (std::size_t j = 0; j < clouds.size(); ++j)
    for (std::size_t k = 0; k < clouds[j].points.size(); ++k) {
      const double v = cut.poly.eval(clouds[j].points[k]);
      if (v > 0.0)
        cut.pos_mass[j] += clouds[j].weights[k];
      else if (v < 0.0)
        cut.neg_mass[j] += clouds[j].weights[k];
    }
  cut.worst_imbalance = 0.0;
  for (std::size_t j = 0; j < clouds.size(); ++j) {
    const double Wj = P.W[j];
    cut.worst_imbalance = std::max(
        cut.worst_imbalance, (Wj - 2.0 * std::min(cut.pos_mass[j], cut.neg_mass[j])) / Wj);
  }
  if (cut.worst_imbalance > 2.0 * opts.tau)
    throw PartitionFailure("ham_sandwich_cut: best imbalance " +
                           std::to_string(cut.worst_imbalance) + " exceeds the threshold " +
                           std::to_string(2.0 * opts.tau));
  return cut;
}

// Degrees d_1 <= ... <= d_S with binom(d_s+n,n)-1 >= 2^{s-1}, S = floor(n log2 D):
// step s bisects every cell of the previous step with a single polynomial.
inline std::vector<int> partition_degree_schedule(int D, int n) {
  require(D >= 1 && n >= 1, "partition_degree_schedule: D and n must be positive");
  const int S = static_cast<int>(std::floor(n * std::log2(static_cast<double>(D)) + 1e-9));
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(S));
  for (int s = 1; s <= S; ++s) {
    const std::uint64_t need = 1ull << (s - 1);
    int d = 1;
    while (binom(d + n, n) - 1 < need) ++d;
    out.push_back(d);
  }
  return out;
}

struct PartitionOptions {
  double tau = 0.05;       // per-cell mass band (1 +- tau)^S around the ideal
  int c_deg = 4;           // degree budget: sum of cut degrees <= c_deg * D
  double eps_shift = 1e-7; // wall shifts drawn uniformly from [-eps_shift, eps_shift]
  std::uint64_t seed = 0;
  HamSandwichOptions inner{};  // tau and seed are overridden per step
  ExecContext ctx{};
};

struct PartitionCell {
  std::vector<int> sign;  // +1 / -1 per cut
  double mass = 0.0;
};

struct PartitionResult {
  int D = 0, n = 0, S = 0;
  std::vector<Polynomial> polys;
  std::vector<double> shifts;
  std::vector<PartitionCell> cells;  // all 2^S sign patterns, binary order
  double wall_mass = 0.0, total_mass = 0.0;
  bool degenerate = false;
  std::vector<int> degree_schedule;
};

// Iterated simultaneous bisection: step s cuts all 2^{s-1} cells with one
// polynomial of the scheduled degree, run at half the cell tolerance so the
// final cells stay inside the (1 +- tau)^S band. Points landing within
// 1e-9 * max|coeff| of a shifted cut are wall mass and leave the recursion.
inline PartitionResult polynomial_partition(const WeightedCloud& mass, int D, int n,
                                            const PartitionOptions& opts = {}) {
  require(n >= 1 && D >= 1, "polynomial_partition: D and n must be positive");
  require(!mass.points.empty(), "polynomial_partition: empty mass");
  require(mass.points.size() == mass.weights.size(),
          "polynomial_partition: points/weights size mismatch");
  for (const auto& p : mass.points)
    require(static_cast<int>(p.size()) == n, "polynomial_partition: point dimension mismatch");

  PartitionResult out;
  out.D = D;
  out.n = n;
  NeumaierSum tot;
  for (const double w : mass.weights) {
    require(w >= 0.0, "polynomial_partition: negative weight");
    tot.add(w);
  }
  out.total_mass = tot.value();

  if (mass.points.size() == 1) {
    out.degenerate = true;
    out.S = 0;
    out.cells.push_back({{}, out.total_mass});
    return out;
  }

  out.degree_schedule = partition_degree_schedule(D, n);
  out.S = static_cast<int>(out.degree_schedule.size());
  int degsum = 0;
  for (const int d : out.degree_schedule) degsum += d;
  require(degsum <= opts.c_deg * D,
          "polynomial_partition: schedule needs total degree " + std::to_string(degsum) +
              ", over the budget c_deg * D = " + std::to_string(opts.c_deg * D));
  if (out.S == 0) {
    out.cells.push_back({{}, out.total_mass});
    return out;
  }
  require(mass.points.size() >= (1ull << out.S),
          "polynomial_partition: " + std::to_string(mass.points.size()) +
              " points cannot fill " + std::to_string(1ull << out.S) + " cells");

  const std::size_t N = mass.points.size();
  std::vector<int> cell_id(N, 0);  // -1 once on a wall
  double wall = 0.0;
  const CounterRng master(opts.seed);

  for (int s = 1; s <= out.S; ++s) {
    const int ncells = 1 << (s - 1);
    std::vector<WeightedCloud> clouds(static_cast<std::size_t>(ncells));
    for (std::size_t i = 0; i < N; ++i) {
      if (cell_id[i] < 0) continue;
      auto& c = clouds[static_cast<std::size_t>(cell_id[i])];
      c.points.push_back(mass.points[i]);
      c.weights.push_back(mass.weights[i]);
    }
    for (const auto& c : clouds)
      if (c.points.empty())
        throw PartitionFailure("polynomial_partition: a cell emptied before step " +
                               std::to_string(s));

    HamSandwichOptions inner = opts.inner;
    inner.tau = 0.5 * opts.tau;
    inner.seed = master.stream(1000 + static_cast<std::uint64_t>(s)).bits(0);
    inner.ctx = opts.ctx;
    const auto cut = ham_sandwich_cut(clouds, out.degree_schedule[static_cast<std::size_t>(s - 1)],
                                      inner);

    const double thr = 1e-9 * cut.poly.max_abs_coeff();
    std::vector<double> qv(N, 0.0);
    for (std::size_t i = 0; i < N; ++i)
      if (cell_id[i] >= 0) qv[i] = cut.poly.eval(mass.points[i]);

    // Tiny wall shift, redrawn until no side of any cell drops below tolerance.
    const CounterRng srng = master.stream(2000 + static_cast<std::uint64_t>(s));
    double shift = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
      shift = srng.uniform(static_cast<std::uint64_t>(attempt), -opts.eps_shift, opts.eps_shift);
      ok = true;
      std::vector<double> pos(static_cast<std::size_t>(ncells), 0.0),
          neg(static_cast<std::size_t>(ncells), 0.0);
      for (std::size_t i = 0; i < N; ++i) {
        if (cell_id[i] < 0) continue;
        const double v = qv[i] + shift;
        if (std::abs(v) <= thr) continue;
        (v > 0.0 ? pos : neg)[static_cast<std::size_t>(cell_id[i])] += mass.weights[i];
      }
      for (int cidx = 0; cidx < ncells && ok; ++cidx) {
        const auto cu = static_cast<std::size_t>(cidx);
        const double side_total = pos[cu] + neg[cu];
        ok = side_total > 0.0 &&
             (side_total - 2.0 * std::min(pos[cu], neg[cu])) / side_total <= opts.tau;
      }
    }
    if (!ok)
      throw PartitionFailure("polynomial_partition: no shift kept step " + std::to_string(s) +
                             " balanced");

    for (std::size_t i = 0; i < N; ++i) {
      if (cell_id[i] < 0) continue;
      const double v = qv[i] + shift;
      if (std::abs(v) <= thr) {
        cell_id[i] = -1;
        wall += mass.weights[i];
      } else if (v > 0.0) {
        cell_id[i] |= 1 << (s - 1);
      }
    }
    out.polys.push_back(cut.poly);
    out.shifts.push_back(shift);
  }

  const int total_cells = 1 << out.S;
  std::vector<double> masses(static_cast<std::size_t>(total_cells), 0.0);
  for (std::size_t i = 0; i < N; ++i)
    if (cell_id[i] >= 0) masses[static_cast<std::size_t>(cell_id[i])] += mass.weights[i];
  out.wall_mass = wall;
  out.cells.reserve(static_cast<std::size_t>(total_cells));
  for (int id = 0; id < total_cells; ++id) {
    PartitionCell cell;
    cell.sign.reserve(static_cast<std::size_t>(out.S));
    for (int s = 0; s < out.S; ++s) cell.sign.push_back((id >> s) & 1 ? 1 : -1);
    cell.mass = masses[static_cast<std::size_t>(id)];
    out.cells.push_back(std::move(cell));
  }

  NeumaierSum check;
  for (const auto& c : out.cells) check.add(c.mass);
  check.add(out.wall_mass);
  if (std::abs(check.value() - out.total_mass) > 1e-10 * out.total_mass)
    throw InternalError("polynomial_partition: cells plus wall fail to resum the total mass");

  const double ideal = (out.total_mass - out.wall_mass) / static_cast<double>(total_cells);
  const double lo = std::pow(1.0 - opts.tau, out.S) * ideal;
  const double hi = std::pow(1.0 + opts.tau, out.S) * ideal;
  for (const auto& c : out.cells)
    if (c.mass < lo || c.mass > hi)
      throw PartitionFailure("polynomial_partition: cell mass " + std::to_string(c.mass) +
                             " outside the (1 +- tau)^S band [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
  return out;
}

}  // namespace mlr
