#pragma once
// JSON forms for geometry declarations and report structures. Patch and
// domain readers consume Cursor so a bad field is rejected with its pointer;
// writers emit plain nlohmann objects whose keys come out sorted.

#include <string>
#include <vector>

#include "mlr/algebraic/serialize.hpp"
#include "mlr/cli/jsonx.hpp"
#include "mlr/experiments/measure.hpp"
#include "mlr/geometry/certificates.hpp"
#include "mlr/geometry/normal_localization.hpp"
#include "mlr/geometry/surface.hpp"

namespace mlr {

inline Domain domain_from_config(const Cursor& c) {
  const auto shape = c.at("shape").as_string();
  const Vec center = to_vec(c.at("center"));
  if (shape == "ball") {
    const double r = c.at("radius").as_number();
    if (r <= 0.0) c.at("radius").fail("ball radius must be positive");
    return Domain::ball_at(center, r);
  }
  if (shape == "box") {
    const Vec hw = to_vec(c.at("half_width"));
    if (hw.size() != center.size()) c.at("half_width").fail("arity differs from center");
    if (hw.minCoeff() <= 0.0) c.at("half_width").fail("half widths must be positive");
    return Domain::box_at(center, hw);
  }
  c.at("shape").fail("unknown shape \"" + shape + "\" (ball | box)");
}

inline json domain_to_json(const Domain& d) {
  json j;
  j["shape"] = d.kind == Domain::Kind::ball ? "ball" : "box";
  j["center"] = vec_to_json(d.center);
  if (d.kind == Domain::Kind::ball)
    j["radius"] = d.radius;
  else
    j["half_width"] = vec_to_json(d.half_width);
  return j;
}

inline SurfacePatch patch_from_config(const Cursor& c) {
  const auto family = c.at("family").as_string();
  const int n = c.at("dim").as_int();
  if (n < 2) c.at("dim").fail("ambient dimension must be at least 2");
  const Domain dom = domain_from_config(c.at("domain"));
  if (dom.dim() != n - 1) c.at("domain").fail("domain must have dimension dim - 1");
  try {
    if (family == "paraboloid") return make_paraboloid(n, dom, c.get_or("scale", 1.0));
    if (family == "sphere_cap") return make_sphere_cap(n, dom, c.get_or("radius", 1.0));
    if (family == "cone") return make_cone(n, dom, c.get_or("scale", 1.0));
    if (family == "cylinder")
      return make_cylinder(n, dom, c.get_or("scale", 1.0), c.get_or("profile_axis", 1));
    if (family == "flat")
      return make_flat(n, dom, to_vec(c.at("slope")), c.get_or("offset", 0.0));
    if (family == "polynomial")
      return make_polynomial_graph(n, dom, poly_from_json(n - 1, c.at("terms").raw()));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    c.fail(e.what());
  }
  c.at("family").fail("unknown family \"" + family +
                      "\" (paraboloid | sphere_cap | cone | cylinder | flat | polynomial)");
}

inline SurfaceSystem system_from_config(const Cursor& c) {
  SurfaceSystem sys;
  const std::size_t m = c.size();
  if (m == 0) c.fail("need at least one patch");
  for (std::size_t i = 0; i < m; ++i) sys.patches.push_back(patch_from_config(c.at(i)));
  try {
    sys.validate();
  } catch (const InvalidInput& e) {
    c.fail(e.what());
  }
  return sys;
}

inline json certificate_to_json(const CertificateReport& r) {
  json j;
  j["kind"] = r.kind;
  j["min"] = r.value;
  j["slack"] = r.slack;
  j["certified"] = r.certified;
  j["grid"] = r.samples_per_dim;
  j["tuples"] = r.tuples;
  j["skipped"] = r.skipped;
  if (r.kind == "curvature") j["patch"] = r.curvature_patch;
  json am = json::array();
  for (const auto& x : r.argmin) am.push_back(vec_to_json(x));
  j["argmin"] = std::move(am);
  return j;
}

inline json localization_to_json(const NormalLocalizationResult& r) {
  json j;
  j["c_tilde"] = r.c_tilde;
  j["min_jacobian"] = r.min_jacobian;
  j["max_residual"] = r.max_residual;
  j["min_transversality"] = r.min_transversality;
  j["near_samples"] = r.near_samples;
  j["seeds"] = r.seeds;
  j["zeros"] = r.zero_params.size();
  json zp = json::array(), za = json::array();
  for (const auto& x : r.zero_params) zp.push_back(vec_to_json(x));
  for (const auto& x : r.zero_points) za.push_back(vec_to_json(x));
  j["zero_params"] = std::move(zp);
  j["zero_points"] = std::move(za);
  return j;
}

// The estimate report embeds the effective config document rather than the
// native struct, so a reader can re-run the exact experiment. Wall-clock
// fields stay out: artifacts must be byte-stable across runs.
inline json estimate_to_json(const EstimateReport& rep, const json& config_doc) {
  json j;
  j["config"] = config_doc;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  j["max_fit_residual"] = rep.max_fit_residual;
  j["degenerate_fit"] = rep.degenerate_fit;
  j["transversality"] = certificate_to_json(rep.transversality);
  json cv = json::array();
  for (const auto& c : rep.curvature) cv.push_back(certificate_to_json(c));
  j["curvature"] = std::move(cv);
  json pts = json::array();
  for (const auto& p : rep.points) {
    json pj;
    pj["R"] = p.R;
    pj["A_emp"] = p.A_emp;
    pj["lhs"] = p.lhs;
    pj["denom"] = p.denom;
    pj["argmax_trial"] = p.argmax_trial;
    pj["description"] = p.description;
    pj["converged"] = p.converged;
    pj["refined"] = p.refined;
    pts.push_back(std::move(pj));
  }
  j["points"] = std::move(pts);
  return j;
}

}  // namespace mlr
