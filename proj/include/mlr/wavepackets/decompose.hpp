#pragma once
// Wave packet decomposition on the frequency lattice. Frequencies split into
// Voronoi cells of the R^{-1/2} lattice inside U; each cell is spread over
// spatial sites by the band-limited window kernel:
//
//   a^{x0,A}_j = beta * sum_{l in A} a_l eta1_hat(r h (j-l)) e^{-i h (j-l).x0},
//   beta = (site_spacing * h / 2 pi)^{n-1}.
//
// Sites run over exactly one period 2 pi / h of the lattice site_spacing * Z
// per dimension (site_spacing snaps the nominal R^{(1+delta)/2} so that the
// period is an integer number of sites). Summing a geometric series over one
// period kills every frequency offset j != l, so sum_T f_T = f holds to
// machine precision; there is no discarded Poisson tail to truncate. Spatial
// translates of a site by full periods carry identical coefficients, making
// the one-period family the complete set of distinct packets.
//
// The window dilation is r = 1/(2 R^{-1/2} + h): the kernel then reaches
// exactly t_max = 2 R^{-1/2}/h lattice steps (eta1_hat vanishes at the next
// step), so every coefficient beyond distance 2 R^{-1/2} of the cell is a
// hard zero while the kernel keeps as much per-packet mass as that support
// bound allows -- the margin in the random-subset orthogonality check lives
// off this. The floor r >= site_spacing/(2 pi) keeps the lattice sum of the
// window exact; it only binds for site periods shorter than any R >= 16
// produces.
//
// Recentering to ball center p: amplitudes are modulated by e^{i p_n phi},
// decomposed at height zero, demodulated, and every tube anchored at p_n.

#include <map>

#include "mlr/extension/density.hpp"
#include "mlr/wavepackets/tube.hpp"
#include "mlr/wavepackets/window.hpp"

namespace mlr {

struct Packet {
  Tube tube;
  SampledDensity field;
  int cell = -1;           // index into cell_ids/cell_xi
  Eigen::VectorXi site;    // x0 = site_spacing * site
  double norm = 0.0;       // ||field||_{L^2}
};

struct PacketDecomposition {
  std::shared_ptr<const SurfacePatch> patch;
  double R = 0.0;
  double delta = 0.0;
  Vec center;  // ball center p in R^n
  double h = 0.0;
  double cell_spacing = 0.0;  // R^{-1/2}
  double site_spacing = 0.0;  // snapped R^{(1+delta)/2}
  double window_scale = 0.0;  // dilation r of eta_1
  std::vector<Eigen::VectorXi> cell_ids;  // frequency lattice 𝓛 as integer coords
  std::vector<Vec> cell_xi;
  Eigen::VectorXi site_start;
  std::int64_t sites_per_dim = 0;
  std::vector<Packet> packets;  // ordered by (cell, site odometer)
  double input_norm = 0.0;
  double dropped_mass = 0.0;  // l2 combination of dropped packet norms
  std::int64_t dropped_count = 0;
  double reconstruction_error = 0.0;  // ||sum_T f_T - f|| / ||f|| on the lattice

  int dim() const { return patch->dim(); }
};

namespace detail {

struct VecLess {
  bool operator()(const Eigen::VectorXi& a, const Eigen::VectorXi& b) const {
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

inline std::vector<Eigen::VectorXi> frequency_lattice(const Domain& dom, double spacing) {
  const int d = dom.dim();
  const auto [lo, hi] = dom.bounding_box();
  Eigen::VectorXi ilo(d), ihi(d);
  for (int i = 0; i < d; ++i) {
    ilo[i] = static_cast<int>(std::ceil(lo[i] / spacing - 1e-9));
    ihi[i] = static_cast<int>(std::floor(hi[i] / spacing + 1e-9));
  }
  std::vector<Eigen::VectorXi> nodes;
  Eigen::VectorXi it = ilo;
  Vec xi(d);
  while (true) {
    for (int i = 0; i < d; ++i) xi[i] = spacing * it[i];
    if (dom.contains(xi, 1e-12 * (1.0 + xi.norm()))) nodes.push_back(it);
    int i = d - 1;
    while (i >= 0 && ++it[i] > ihi[i]) {
      it[i] = ilo[i];
      --i;
    }
    if (i < 0) break;
  }
  return nodes;  // odometer order is lexicographic
}

}  // namespace detail

inline PacketDecomposition decompose(const SampledDensity& f, double R, double delta,
                                     std::optional<Vec> ball_center = std::nullopt,
                                     const ExecContext& ctx = {}) {
  require(R >= 16.0, "decompose: R must be at least 16");
  require(delta > 0.0 && delta <= 0.1, "decompose: need 0 < delta <= 0.1");
  const int d = f.dim();
  const int n = f.patch->ambient_dim;

  PacketDecomposition dec;
  dec.patch = f.patch;
  dec.R = R;
  dec.delta = delta;
  dec.center = ball_center ? std::move(*ball_center) : Vec(Vec::Zero(n));
  require(dec.center.size() == n, "decompose: ball center dimension mismatch");
  dec.h = f.h;
  dec.cell_spacing = 1.0 / std::sqrt(R);

  const double q_real = dec.cell_spacing / f.h;
  const auto q = static_cast<std::int64_t>(std::llround(q_real));
  require(q >= 1 && std::abs(q_real - static_cast<double>(q)) <= 1e-9 * q_real,
          "decompose: lattice spacing " + std::to_string(f.h) +
              " does not divide the cell spacing " + std::to_string(dec.cell_spacing));

  // Frequency cells.
  dec.cell_ids = detail::frequency_lattice(f.patch->domain, dec.cell_spacing);
  require(!dec.cell_ids.empty(), "decompose: no frequency lattice nodes inside the domain");
  std::map<Eigen::VectorXi, int, detail::VecLess> cell_ordinal;
  for (std::size_t c = 0; c < dec.cell_ids.size(); ++c) {
    Vec xi(d);
    for (int i = 0; i < d; ++i) xi[i] = dec.cell_spacing * dec.cell_ids[c][i];
    dec.cell_xi.push_back(xi);
    cell_ordinal.emplace(dec.cell_ids[c], static_cast<int>(c));
  }

  // Assign every density node to the nearest cell center inside U.
  const auto J = f.size();
  std::vector<std::vector<std::size_t>> members(dec.cell_ids.size());
  for (std::size_t j = 0; j < J; ++j) {
    Eigen::VectorXi rounded(d);
    for (int i = 0; i < d; ++i)
      rounded[i] = static_cast<int>(std::floor(static_cast<double>(f.idx[j][i]) / q + 0.5));
    auto hit = cell_ordinal.find(rounded);
    int best;
    if (hit != cell_ordinal.end()) {
      best = hit->second;
    } else {
      best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      const Vec xi = f.node_xi(j);
      for (std::size_t c = 0; c < dec.cell_xi.size(); ++c) {
        const double dist = (xi - dec.cell_xi[c]).norm();
        if (dist < best_dist - 1e-12) {
          best_dist = dist;
          best = static_cast<int>(c);
        }
      }
    }
    members[static_cast<std::size_t>(best)].push_back(j);
  }

  // Site lattice: one full period per dimension, block centered on the ball.
  const double period = 2.0 * M_PI / f.h;
  const double nominal = std::pow(R, 0.5 * (1.0 + delta));
  const auto nsites = std::max<std::int64_t>(1, std::llround(period / nominal));
  dec.sites_per_dim = nsites;
  dec.site_spacing = period / static_cast<double>(nsites);
  dec.window_scale =
      std::max(1.0 / (2.0 / std::sqrt(R) + f.h), dec.site_spacing * PacketWindow::min_stretch);

  const int g = f.patch->graph_axis - 1;
  Vec center_sp(d);
  {
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (i != g) center_sp[k++] = dec.center[i];
  }
  const double p_n = dec.center[g];
  dec.site_start.resize(d);
  for (int i = 0; i < d; ++i)
    dec.site_start[i] = static_cast<int>(
        std::ceil((center_sp[i] - 0.5 * period) / dec.site_spacing - 1e-9));

  dec.input_norm = f.l2_norm();
  if (dec.input_norm == 0.0) return dec;

  // Kernel reach in lattice steps: eta1_hat(r h t) = 0 once r h |t| >= 1.
  const auto t_max = static_cast<int>(std::ceil(1.0 / (dec.window_scale * f.h) - 1e-9)) - 1;
  require(t_max < nsites, "decompose: window kernel wider than the site period");
  std::vector<double> kernel(static_cast<std::size_t>(t_max) + 1);
  for (int t = 0; t <= t_max; ++t)
    kernel[static_cast<std::size_t>(t)] = PacketWindow::eta1_hat(dec.window_scale * f.h * t);
  const double beta = ipow(dec.site_spacing * f.h / (2.0 * M_PI), d);

  // Recentering modulation.
  std::vector<cplx> mod(J);
  for (std::size_t j = 0; j < J; ++j) {
    const double ph = p_n * f.patch->phi(f.node_xi(j));
    mod[j] = f.amp[j] * cplx{std::cos(ph), std::sin(ph)};
  }

  const double drop_threshold = 1e-12 * dec.input_norm;
  const auto n_cells = static_cast<std::int64_t>(dec.cell_ids.size());
  std::vector<std::vector<Packet>> cell_packets(static_cast<std::size_t>(n_cells));
  std::vector<double> cell_dropped(static_cast<std::size_t>(n_cells), 0.0);
  std::vector<std::int64_t> cell_dropped_count(static_cast<std::size_t>(n_cells), 0);

  parallel_chunks(ctx, n_cells, 1, [&](std::int64_t, std::int64_t cb, std::int64_t ce) {
    for (std::int64_t c = cb; c < ce; ++c) {
      const auto& ls = members[static_cast<std::size_t>(c)];
      if (ls.empty()) continue;
      // Support box: members dilated by the kernel reach.
      Eigen::VectorXi lo = f.idx[ls[0]], hi = f.idx[ls[0]];
      for (auto l : ls) {
        lo = lo.cwiseMin(f.idx[l]);
        hi = hi.cwiseMax(f.idx[l]);
      }
      std::vector<Eigen::VectorXi> support;
      {
        Eigen::VectorXi it = (lo.array() - t_max).matrix();
        const Eigen::VectorXi last = (hi.array() + t_max).matrix();
        const Eigen::VectorXi first = it;
        while (true) {
          bool near = false;
          for (auto l : ls)
            if ((f.idx[l] - it).cwiseAbs().maxCoeff() <= t_max) {
              near = true;
              break;
            }
          if (near) support.push_back(it);
          int i = d - 1;
          while (i >= 0 && ++it[i] > last[i]) {
            it[i] = first[i];
            --i;
          }
          if (i < 0) break;
        }
      }
      // Demodulation phases and phi values on the support.
      std::vector<cplx> demod(support.size());
      for (std::size_t s = 0; s < support.size(); ++s) {
        Vec xi(d);
        for (int i = 0; i < d; ++i) xi[i] = f.h * support[s][i];
        const double ph = -p_n * f.patch->phi(xi);
        demod[s] = {std::cos(ph), std::sin(ph)};
      }

      std::vector<std::vector<cplx>> kt(static_cast<std::size_t>(d));
      Eigen::VectorXi site = dec.site_start;
      while (true) {
        Vec x0(d);
        for (int i = 0; i < d; ++i) x0[i] = dec.site_spacing * site[i];
        for (int i = 0; i < d; ++i) {
          auto& tab = kt[static_cast<std::size_t>(i)];
          tab.assign(2 * static_cast<std::size_t>(t_max) + 1, cplx{0.0, 0.0});
          for (int t = -t_max; t <= t_max; ++t) {
            const double ang = -f.h * t * x0[i];
            tab[static_cast<std::size_t>(t + t_max)] =
                kernel[static_cast<std::size_t>(std::abs(t))] * cplx{std::cos(ang), std::sin(ang)};
          }
        }
        std::vector<cplx> amp(support.size(), cplx{0.0, 0.0});
        double norm2 = 0.0;
        for (std::size_t s = 0; s < support.size(); ++s) {
          cplx acc{0.0, 0.0};
          for (auto l : ls) {
            cplx w = mod[l];
            bool zero = false;
            for (int i = 0; i < d && !zero; ++i) {
              const int t = support[s][i] - f.idx[l][i];
              if (std::abs(t) > t_max) {
                zero = true;
                break;
              }
              w *= kt[static_cast<std::size_t>(i)][static_cast<std::size_t>(t + t_max)];
            }
            if (!zero) acc += w;
          }
          amp[s] = beta * acc;
          norm2 += std::norm(amp[s]);
        }
        const double nrm = std::sqrt(norm2) * std::pow(f.h, 0.5 * d);
        if (nrm > drop_threshold) {
          Packet p;
          p.cell = static_cast<int>(c);
          p.site = site;
          p.norm = nrm;
          p.field.patch = f.patch;
          p.field.h = f.h;
          p.field.region = f.region;
          p.field.idx = support;
          p.field.amp.resize(amp.size());
          for (std::size_t s = 0; s < amp.size(); ++s) p.field.amp[s] = amp[s] * demod[s];
          p.tube = make_tube(f.patch, dec.cell_xi[static_cast<std::size_t>(c)], x0, R, delta, p_n);
          cell_packets[static_cast<std::size_t>(c)].push_back(std::move(p));
        } else {
          cell_dropped[static_cast<std::size_t>(c)] += nrm * nrm;
          ++cell_dropped_count[static_cast<std::size_t>(c)];
        }
        int i = d - 1;
        while (i >= 0 && ++site[i] >= dec.site_start[i] + nsites) {
          site[i] = dec.site_start[i];
          --i;
        }
        if (i < 0) break;
      }
    }
  });

  double dropped2 = 0.0;
  for (std::size_t c = 0; c < cell_packets.size(); ++c) {
    dropped2 += cell_dropped[c];
    dec.dropped_count += cell_dropped_count[c];
    for (auto& p : cell_packets[c]) dec.packets.push_back(std::move(p));
  }
  dec.dropped_mass = std::sqrt(dropped2);

  // Re-summation defect against the input density.
  std::map<Eigen::VectorXi, cplx, detail::VecLess> acc;
  for (const auto& p : dec.packets)
    for (std::size_t s = 0; s < p.field.idx.size(); ++s) acc[p.field.idx[s]] += p.field.amp[s];
  NeumaierSum err2;
  for (std::size_t j = 0; j < J; ++j) {
    auto it = acc.find(f.idx[j]);
    const cplx got = (it == acc.end()) ? cplx{0.0, 0.0} : it->second;
    err2.add(std::norm(got - f.amp[j]));
    if (it != acc.end()) acc.erase(it);
  }
  for (const auto& [k, v] : acc) err2.add(std::norm(v));
  dec.reconstruction_error = std::sqrt(err2.value()) * std::pow(f.h, 0.5 * d) / dec.input_norm;
  return dec;
}

// Sum a subset of packets back to a lattice density (full union support).
inline SampledDensity sum_packets(const PacketDecomposition& dec,
                                  const std::vector<std::size_t>& indices) {
  SampledDensity out;
  out.patch = dec.patch;
  out.h = dec.h;
  std::map<Eigen::VectorXi, cplx, detail::VecLess> acc;
  for (auto i : indices) {
    require(i < dec.packets.size(), "sum_packets: packet index out of range");
    const auto& p = dec.packets[i];
    for (std::size_t s = 0; s < p.field.idx.size(); ++s) acc[p.field.idx[s]] += p.field.amp[s];
    out.region = p.field.region;
  }
  for (const auto& [k, v] : acc) {
    out.idx.push_back(k);
    out.amp.push_back(v);
  }
  return out;
}

}  // namespace mlr
