#pragma once
// Packet-level operations: selection by spatial sets, angular splitting
// against a subspace, orthogonality and decay diagnostics.

#include "mlr/extension/evaluate.hpp"
#include "mlr/wavepackets/decompose.hpp"

namespace mlr {

struct BallRegion {
  Vec center;
  double radius = 0.0;
};

struct SelectionSet {
  std::vector<BallRegion> balls;
  std::vector<Vec> points;
};

// Indices (ascending) of packets whose tube meets the set.
inline std::vector<std::size_t> select_packets_by_set(const PacketDecomposition& dec,
                                                      const SelectionSet& set) {
  for (const auto& b : set.balls)
    require(b.radius >= 0.0 && b.center.size() == dec.patch->ambient_dim,
            "select_packets_by_set: malformed ball");
  for (const auto& p : set.points)
    require(p.size() == dec.patch->ambient_dim, "select_packets_by_set: malformed point");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dec.packets.size(); ++i) {
    const Tube& t = dec.packets[i].tube;
    bool hit = false;
    for (const auto& b : set.balls)
      if (t.meets_ball(b.center, b.radius)) {
        hit = true;
        break;
      }
    if (!hit)
      for (const auto& p : set.points)
        if (t.contains(p)) {
          hit = true;
          break;
        }
    if (hit) out.push_back(i);
  }
  return out;
}

struct AngleSplit {
  std::vector<std::size_t> transversal;      // angle(v(T), V) > 4 gamma0
  std::vector<std::size_t> non_transversal;  // the rest
};

inline AngleSplit split_by_angle(const PacketDecomposition& dec, const Mat& basis,
                                 double gamma0) {
  require(gamma0 > 0.0, "split_by_angle: gamma0 must be positive");
  require(basis.rows() == dec.patch->ambient_dim, "split_by_angle: basis dimension mismatch");
  require(basis.cols() >= 1 && basis.cols() <= basis.rows(),
          "split_by_angle: basis must span a proper nonzero subspace");
  require((basis.transpose() * basis - Mat::Identity(basis.cols(), basis.cols())).norm() <= 1e-10,
          "split_by_angle: basis columns must be orthonormal");
  AngleSplit split;
  for (std::size_t i = 0; i < dec.packets.size(); ++i) {
    if (dec.packets[i].tube.angle_to(basis) > 4.0 * gamma0)
      split.transversal.push_back(i);
    else
      split.non_transversal.push_back(i);
  }
  return split;
}

struct OrthogonalityReport {
  double max_ratio = 0.0;   // worst ||sum f_T||^2 / sum ||f_T||^2
  double mean_ratio = 0.0;
  std::int64_t trials = 0;
};

inline OrthogonalityReport orthogonality_check(const PacketDecomposition& dec,
                                               std::int64_t trials, std::uint64_t seed) {
  require(trials >= 1, "orthogonality_check: need at least one trial");
  OrthogonalityReport rep;
  rep.trials = trials;
  if (dec.packets.empty()) return rep;
  const CounterRng rng(seed);
  double sum_ratio = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const auto trial_rng = rng.stream(static_cast<std::uint64_t>(t));
    std::map<Eigen::VectorXi, cplx, detail::VecLess> acc;
    NeumaierSum denom;
    std::int64_t picked = 0;
    for (std::size_t i = 0; i < dec.packets.size(); ++i) {
      if (trial_rng.unit(i) >= 0.5) continue;
      ++picked;
      const auto& p = dec.packets[i];
      denom.add(p.norm * p.norm);
      for (std::size_t s = 0; s < p.field.idx.size(); ++s) acc[p.field.idx[s]] += p.field.amp[s];
    }
    if (picked == 0 || denom.value() <= 0.0) continue;
    NeumaierSum num;
    for (const auto& [k, v] : acc) num.add(std::norm(v));
    const double ratio = num.value() * ipow(dec.h, dec.dim()) / denom.value();
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    sum_ratio += ratio;
  }
  rep.mean_ratio = sum_ratio / static_cast<double>(trials);
  return rep;
}

struct DecayCheck {
  std::vector<double> normalized;  // per probe, in input order
  double max_normalized = 0.0;
};

// |E f_T(x)| (1 + d(x,T')/core)^{N0} R^{1/2} / ||f_T|| over the probes,
// N0 = 4. Probes must stay at least one core radius away from T'.
inline DecayCheck packet_decay_check(const Tube& tube, const SampledDensity& field,
                                     const std::vector<Vec>& probes, const ExecContext& ctx = {}) {
  require(!probes.empty(), "packet_decay_check: need at least one probe");
  const double norm = field.l2_norm();
  require(norm > 0.0, "packet_decay_check: zero packet");
  std::vector<double> dist(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    dist[i] = tube.dist_to_core(probes[i]);
    require(dist[i] >= tube.core_radius,
            "packet_decay_check: probe closer than one core radius to the core tube");
  }
  const auto vals = evaluate_extension_at(field, probes, ctx);
  DecayCheck chk;
  chk.normalized.resize(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double grow = std::pow(1.0 + dist[i] / tube.core_radius, 4.0);
    chk.normalized[i] = std::abs(vals[i]) * grow * std::sqrt(tube.R) / norm;
    chk.max_normalized = std::max(chk.max_normalized, chk.normalized[i]);
  }
  return chk;
}

inline DecayCheck packet_decay_check(const PacketDecomposition& dec, std::size_t packet_index,
                                     const std::vector<Vec>& probes, const ExecContext& ctx = {}) {
  require(packet_index < dec.packets.size(), "packet_decay_check: packet index out of range");
  const auto& p = dec.packets[packet_index];
  return packet_decay_check(p.tube, p.field, probes, ctx);
}

}  // namespace mlr
