#pragma once
// JSON forms for polynomials and partitions. A polynomial is an array of
// {"exponents": [...], "coeff": f} terms; a partition carries its cuts,
// shifts, cells and wall mass, everything needed to re-derive cell membership.

#include <json.hpp>

#include "mlr/algebraic/partition.hpp"

namespace mlr {

inline nlohmann::json poly_to_json(const Polynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : p.terms()) terms.push_back({{"exponents", t.exp}, {"coeff", t.coeff}});
  return terms;
}

inline Polynomial poly_from_json(int nvars, const nlohmann::json& j) {
  require(j.is_array(), "poly_from_json: expected an array of terms");
  Polynomial p(nvars);
  for (const auto& t : j) {
    const auto exp = t.at("exponents").get<std::vector<int>>();
    require(static_cast<int>(exp.size()) == nvars, "poly_from_json: exponent arity mismatch");
    p = p + Polynomial::monomial(exp, t.at("coeff").get<double>());
  }
  return p;
}

inline nlohmann::json partition_to_json(const PartitionResult& part) {
  nlohmann::json j;
  j["D"] = part.D;
  j["n"] = part.n;
  j["S"] = part.S;
  j["degree_schedule"] = part.degree_schedule;
  j["degenerate"] = part.degenerate;
  j["total_mass"] = part.total_mass;
  j["wall_mass"] = part.wall_mass;
  j["shifts"] = part.shifts;
  nlohmann::json polys = nlohmann::json::array();
  for (const auto& q : part.polys) polys.push_back(poly_to_json(q));
  j["polys"] = std::move(polys);
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : part.cells)
    cells.push_back({{"sign_vector", c.sign}, {"mass", c.mass}});
  j["cells"] = std::move(cells);
  return j;
}

inline PartitionResult partition_from_json(const nlohmann::json& j) {
  PartitionResult part;
  part.D = j.at("D").get<int>();
  part.n = j.at("n").get<int>();
  part.S = j.at("S").get<int>();
  part.degree_schedule = j.at("degree_schedule").get<std::vector<int>>();
  part.degenerate = j.at("degenerate").get<bool>();
  part.total_mass = j.at("total_mass").get<double>();
  part.wall_mass = j.at("wall_mass").get<double>();
  part.shifts = j.at("shifts").get<std::vector<double>>();
  for (const auto& q : j.at("polys")) part.polys.push_back(poly_from_json(part.n, q));
  for (const auto& c : j.at("cells")) {
    PartitionCell cell;
    cell.sign = c.at("sign_vector").get<std::vector<int>>();
    cell.mass = c.at("mass").get<double>();
    part.cells.push_back(std::move(cell));
  }
  require(part.polys.size() == static_cast<std::size_t>(part.S),
          "partition_from_json: cut count disagrees with S");
  require(part.shifts.size() == part.polys.size(), "partition_from_json: shifts arity mismatch");
  return part;
}

}  // namespace mlr
