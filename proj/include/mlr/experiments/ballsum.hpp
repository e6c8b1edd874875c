#pragma once
// The l^{2/(k-1)} ball-sum inequality: over centers x0 of the covering
// lattice R^{1/2+delta0} Z^n with |x0| <= 2R, sum the products of the norms
// of the packet sums selected by each ball and compare against the product
// of the full density norms. The growth allowance is (R^{1/2-delta0})^{0.2}
// times a configured constant; the ratio is reported, not asserted.

#include <map>

#include "mlr/wavepackets/ops.hpp"

namespace mlr {

struct BallSumOptions {
  double c_ball = 10.0;
  ExecContext ctx{};
};

struct BallSumReport {
  double left = 0.0;
  double right = 0.0;
  double ratio = 0.0;
  double bound = 0.0;            // c_ball * (R^{1/2-delta0})^{0.2}
  double ball_radius = 0.0;
  std::int64_t centers = 0;
  bool vacuous = false;          // zero densities: 0/0 guarded
  bool within_contract = false;
};

namespace ballsum_detail {

// || sum of the selected packet fields ||_{L^2} on the shared lattice.
inline double selected_norm(const PacketDecomposition& dec, const std::vector<std::size_t>& sel) {
  std::map<Eigen::VectorXi, cplx, detail::VecLess> acc;
  for (std::size_t i : sel) {
    const auto& f = dec.packets[i].field;
    for (std::size_t s = 0; s < f.idx.size(); ++s) acc[f.idx[s]] += f.amp[s];
  }
  NeumaierSum e;
  for (const auto& [k, v] : acc) e.add(std::norm(v));
  return std::sqrt(e.value()) * std::pow(dec.h, 0.5 * dec.dim());
}

}  // namespace ballsum_detail

inline BallSumReport ball_sum_check(const std::vector<PacketDecomposition>& decs, double delta0,
                                    const BallSumOptions& opt = {}) {
  require(decs.size() >= 2, "ball_sum_check: need k >= 2 decompositions");
  require(delta0 > 0.0, "ball_sum_check: delta0 must be positive");
  const double R = decs.front().R;
  const int n = decs.front().patch->ambient_dim;
  for (const auto& d : decs) {
    require(d.R == R, "ball_sum_check: decompositions must share the scale R");
    require(d.patch->ambient_dim == n, "ball_sum_check: mixed ambient dimensions");
  }
  const auto k = static_cast<int>(decs.size());
  const double q = 2.0 / static_cast<double>(k - 1);

  BallSumReport rep;
  rep.ball_radius = std::pow(R, 0.5 + delta0);
  rep.bound = opt.c_ball * std::pow(std::pow(R, 0.5 - delta0), 0.2);
  rep.right = 1.0;
  for (const auto& d : decs) rep.right *= d.input_norm;
  if (rep.right <= 0.0) {
    rep.vacuous = true;
    return rep;
  }

  // Covering lattice centers, odometer order.
  const auto m = static_cast<std::int64_t>(std::floor(2.0 * R / rep.ball_radius));
  std::vector<Vec> centers;
  std::vector<std::int64_t> it(static_cast<std::size_t>(n), -m);
  Vec c(n);
  while (true) {
    for (int a = 0; a < n; ++a)
      c[a] = rep.ball_radius * static_cast<double>(it[static_cast<std::size_t>(a)]);
    if (c.norm() <= 2.0 * R) centers.push_back(c);
    int a = n - 1;
    while (a >= 0 && ++it[static_cast<std::size_t>(a)] > m) {
      it[static_cast<std::size_t>(a)] = -m;
      --a;
    }
    if (a < 0) break;
  }
  rep.centers = static_cast<std::int64_t>(centers.size());

  std::vector<double> terms(centers.size(), 0.0);
  parallel_chunks(opt.ctx, static_cast<std::int64_t>(centers.size()),
                  std::max<std::int64_t>(1, static_cast<std::int64_t>(centers.size()) / 64),
                  [&](std::int64_t, std::int64_t b, std::int64_t e) {
                    for (std::int64_t bi = b; bi < e; ++bi) {
                      SelectionSet set;
                      set.balls.push_back(BallRegion{centers[static_cast<std::size_t>(bi)],
                                                     rep.ball_radius});
                      double prod = 1.0;
                      for (const auto& d : decs) {
                        const auto sel = select_packets_by_set(d, set);
                        prod *= ballsum_detail::selected_norm(d, sel);
                        if (prod == 0.0) break;
                      }
                      terms[static_cast<std::size_t>(bi)] = std::pow(prod, q);
                    }
                  });
  NeumaierSum lsum;
  for (double t : terms) lsum.add(t);
  rep.left = std::pow(lsum.value(), 1.0 / q);
  rep.ratio = rep.left / rep.right;
  rep.within_contract = rep.ratio <= rep.bound;
  return rep;
}

}  // namespace mlr
