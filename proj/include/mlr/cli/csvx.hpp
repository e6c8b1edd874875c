#pragma once
// RFC-4180 output: CRLF record ends, fields quoted only when they contain a
// separator, a quote or a line break. Numbers print as shortest round-trip
// decimals so re-parsing reproduces the exact double.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mlr/experiments/measure.hpp"
#include "mlr/wavepackets/decompose.hpp"

namespace mlr {

inline std::string csv_num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(fields[i]);
  }
  os << "\r\n";
}

// One row per tube: frequency node, ambient anchor, direction, packet norm.
inline void packet_inventory_csv(std::ostream& os, const PacketDecomposition& dec) {
  const int n = dec.patch ? dec.patch->ambient_dim : static_cast<int>(dec.center.size());
  std::vector<std::string> head = {"packet"};
  for (int i = 1; i < n; ++i) head.push_back("xi_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) head.push_back("x_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) head.push_back("v_" + std::to_string(i));
  head.push_back("norm");
  csv_row(os, head);
  for (std::size_t pi = 0; pi < dec.packets.size(); ++pi) {
    const auto& p = dec.packets[pi];
    std::vector<std::string> row = {std::to_string(pi)};
    for (Eigen::Index i = 0; i < p.tube.xi.size(); ++i) row.push_back(csv_num(p.tube.xi[i]));
    const Vec a = p.tube.anchor();
    for (Eigen::Index i = 0; i < a.size(); ++i) row.push_back(csv_num(a[i]));
    for (Eigen::Index i = 0; i < p.tube.direction.size(); ++i)
      row.push_back(csv_num(p.tube.direction[i]));
    row.push_back(csv_num(p.norm));
    csv_row(os, row);
  }
}

inline void estimate_csv(std::ostream& os, const EstimateReport& rep) {
  csv_row(os, {"R", "A_emp", "lhs", "denom", "argmax_trial", "converged", "refined"});
  for (const auto& p : rep.points)
    csv_row(os, {csv_num(p.R), csv_num(p.A_emp), csv_num(p.lhs), csv_num(p.denom),
                 std::to_string(p.argmax_trial), p.converged ? "true" : "false",
                 csv_num(p.refined)});
}

}  // namespace mlr
