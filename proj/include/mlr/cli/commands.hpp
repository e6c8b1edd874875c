#pragma once
// The four subcommands. Each consumes a validated config document, writes
// its artifacts into the output directory and returns the process exit code:
// 0 all checks pass, 1 a contract or certificate failed, 2 never (schema
// errors throw ConfigError before any work starts). A RunManifest lands
// last, after the outputs it lists.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "mlr/cli/csvx.hpp"
#include "mlr/cli/field_io.hpp"
#include "mlr/cli/manifest.hpp"
#include "mlr/cli/serialize.hpp"
#include "mlr/cli/svgx.hpp"
#include "mlr/experiments/families.hpp"
#include "mlr/wavepackets/ops.hpp"

namespace mlr {

struct CmdOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  bool plot = false;
};

// Tracks what was written so the manifest can list it.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void write_text(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << bytes;
    require(out.good(), "cannot write " + (dir_ / name).string());
    names_.push_back(name);
  }

  void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

  const std::filesystem::path& dir() const { return dir_; }
  const std::vector<std::string>& names() const { return names_; }
  void note(const std::string& name) { names_.push_back(name); }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

namespace cmd_detail {

inline DensityFamily family_at(const Cursor& c) {
  try {
    return parse_family(c.as_string());
  } catch (const InvalidInput& e) {
    c.fail(e.what());
  }
}

inline std::uint64_t effective_seed(const json& doc) {
  return doc.contains("seed") ? doc.at("seed").get<std::uint64_t>() : 0;
}

}  // namespace cmd_detail

inline int cmd_geometry(const json& doc, Artifacts& art, const CmdOptions& opts,
                        std::uint64_t seed) {
  (void)seed;
  const Cursor root(doc);
  const auto sys = system_from_config(root.at("system"));
  const int samples = root.get_or("samples", 9);
  if (samples < 2) root.at("samples").fail("need at least 2 samples per dimension");
  const ExecContext ctx{opts.threads};

  json out;
  bool pass = true;

  const auto tv = check_transversality(sys, samples, ctx);
  out["transversality"] = certificate_to_json(tv);
  pass = pass && tv.certified > 0.0;

  if (root.get_or("curvature", true)) {
    json cv = json::array();
    for (int l = 1; l <= sys.k(); ++l) {
      const auto c = check_curvature_condition(sys, l, samples, ctx);
      cv.push_back(certificate_to_json(c));
      pass = pass && c.certified > 0.0;
    }
    out["curvature"] = std::move(cv);
  }

  if (root.has("localization")) {
    const Cursor lc = root.at("localization");
    const int pi = lc.at("patch").as_int();
    if (pi < 1 || pi > sys.k()) lc.at("patch").fail("patch index out of range");
    const auto& patch = sys.patches[static_cast<std::size_t>(pi - 1)];
    const auto axes = lc.at("axes").as_ints();
    if (axes.empty()) lc.at("axes").fail("need at least one axis");
    Mat h_perp = Mat::Zero(patch.ambient_dim, static_cast<Eigen::Index>(axes.size()));
    for (std::size_t a = 0; a < axes.size(); ++a) {
      if (axes[a] < 1 || axes[a] > patch.ambient_dim)
        lc.at("axes").at(a).fail("axis out of range");
      h_perp(axes[a] - 1, static_cast<Eigen::Index>(a)) = 1.0;
    }
    const double mu = lc.at("mu").as_number();
    if (mu <= 0.0) lc.at("mu").fail("mu must be positive");
    const auto loc = normal_localization_submanifold(patch, h_perp, mu,
                                                     lc.get_or("seed_res", 24), 1e-3, ctx);
    out["localization"] = localization_to_json(loc);
    pass = pass && loc.min_transversality > 0.0 && loc.min_jacobian > 0.0;
  }

  out["pass"] = pass;
  art.write_json("certificates.json", out);
  return pass ? 0 : 1;
}

inline int cmd_decompose(const json& doc, Artifacts& art, const CmdOptions& opts,
                         std::uint64_t seed) {
  const Cursor root(doc);
  const auto patch = std::make_shared<SurfacePatch>(patch_from_config(root.at("patch")));
  const double R = root.at("R").as_number();
  const double delta = root.at("delta").as_number();
  const Cursor dc = root.at("density");
  const auto family = cmd_detail::family_at(dc.at("family"));
  const double h = dc.at("h").as_number();
  if (h <= 0.0) dc.at("h").fail("spacing must be positive");
  const ExecContext ctx{opts.threads};

  const auto f = make_family_density(patch, family, h, R, CounterRng(seed), 0);
  std::optional<Vec> center;
  if (root.has("center")) center = to_vec(root.at("center"));
  const auto dec = center ? decompose(f, R, delta, *center, ctx) : decompose(f, R, delta, ctx);

  {
    std::ostringstream csv;
    packet_inventory_csv(csv, dec);
    art.write_text("packets.csv", csv.str());
  }
  if (root.get_or("export_field", false)) {
    write_field(art.dir() / "density", f, 0);
    art.note("density.bin");
    art.note("density.json");
  }

  const Cursor th = root.has("thresholds") ? root.at("thresholds") : root;
  json checks = json::array();
  bool pass = true;
  const auto push = [&](json row, bool ok) {
    row["pass"] = ok;
    pass = pass && ok;
    checks.push_back(std::move(row));
  };

  {
    const double thr = th.has("thresholds") ? 1e-6 : th.get_or("reconstruction", 1e-6);
    const bool ok = dec.reconstruction_error <= thr;
    push({{"check", "reconstruction"}, {"value", dec.reconstruction_error}, {"threshold", thr}},
         ok);
  }
  {
    const int trials = root.get_or("orthogonality_trials", 100);
    if (trials < 1) root.at("orthogonality_trials").fail("need at least one trial");
    const auto orep = orthogonality_check(dec, trials, seed);
    const double thr = th.has("thresholds") ? 10.0 : th.get_or("orthogonality", 10.0);
    push({{"check", "orthogonality"},
          {"value", orep.max_ratio},
          {"mean", orep.mean_ratio},
          {"trials", trials},
          {"threshold", thr}},
         orep.max_ratio <= thr);
  }
  if (root.get_or("decay", true) && !dec.packets.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < dec.packets.size(); ++i)
      if (dec.packets[i].norm > dec.packets[best].norm) best = i;
    const auto& tube = dec.packets[best].tube;
    int a = 0;
    for (int i = 1; i < tube.direction.size(); ++i)
      if (std::abs(tube.direction[i]) < std::abs(tube.direction[a])) a = i;
    Vec u = Vec::Zero(tube.direction.size());
    u[a] = 1.0;
    u -= u.dot(tube.direction) * tube.direction;
    u /= u.norm();
    std::vector<Vec> probes;
    for (const double d : {2.0, 4.0, 8.0})
      probes.push_back(tube.anchor() + (d * tube.core_radius) * u);
    const auto drep = packet_decay_check(dec, best, probes, ctx);
    const double thr = th.has("thresholds") ? 1e3 : th.get_or("decay", 1e3);
    push({{"check", "decay"},
          {"value", drep.max_normalized},
          {"values", drep.normalized},
          {"packet", best},
          {"threshold", thr}},
         drep.max_normalized <= thr);
  }

  json rep;
  rep["R"] = R;
  rep["delta"] = delta;
  rep["packets"] = dec.packets.size();
  rep["input_norm"] = dec.input_norm;
  rep["dropped_count"] = dec.dropped_count;
  rep["dropped_mass"] = dec.dropped_mass;
  rep["checks"] = std::move(checks);
  rep["pass"] = pass;
  art.write_json("report.json", rep);
  return pass ? 0 : 1;
}

inline int cmd_partition(const json& doc, Artifacts& art, const CmdOptions& opts,
                         std::uint64_t seed) {
  const Cursor root(doc);
  const int n = root.at("dim").as_int();
  const int D = root.at("degree").as_int();
  if (n < 1) root.at("dim").fail("dimension must be positive");
  if (D < 1) root.at("degree").fail("degree must be positive");
  const double tau = root.get_or("tau", 0.05);
  if (tau <= 0.0 || tau >= 1.0) root.at("tau").fail("tau must lie in (0, 1)");

  WeightedCloud cloud;
  const Cursor mc = root.at("mass");
  const auto type = mc.at("type").as_string();
  if (type == "uniform_grid") {
    const Domain box = domain_from_config(mc.at("box"));
    if (box.kind != Domain::Kind::box) mc.at("box").fail("uniform_grid needs a box");
    if (box.dim() != n) mc.at("box").fail("box dimension must match dim");
    const int m = mc.at("per_dim").as_int();
    if (m < 2) mc.at("per_dim").fail("need at least 2 samples per dimension");
    double vol = 1.0;
    for (int k = 0; k < n; ++k) vol *= 2.0 * box.half_width[k];
    const double w = vol / std::pow(static_cast<double>(m), n);
    std::vector<int> ix(static_cast<std::size_t>(n), 0);
    while (true) {
      Vec x(n);
      for (int k = 0; k < n; ++k)
        x[k] = box.center[k] - box.half_width[k] +
               (ix[static_cast<std::size_t>(k)] + 0.5) * (2.0 * box.half_width[k] / m);
      cloud.points.push_back(x);
      cloud.weights.push_back(w);
      int k = n - 1;
      while (k >= 0 && ++ix[static_cast<std::size_t>(k)] == m) ix[static_cast<std::size_t>(k--)] = 0;
      if (k < 0) break;
    }
  } else if (type == "points") {
    const Cursor pts = mc.at("points");
    const Cursor wts = mc.at("weights");
    if (pts.size() != wts.size()) mc.at("weights").fail("arity differs from points");
    if (pts.size() == 0) mc.at("points").fail("need at least one point");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec x = to_vec(pts.at(i));
      if (x.size() != n) pts.at(i).fail("point dimension must match dim");
      const double w = wts.at(i).as_number();
      if (w < 0.0) wts.at(i).fail("weights must be non-negative");
      cloud.points.push_back(x);
      cloud.weights.push_back(w);
    }
  } else {
    mc.at("type").fail("unknown mass type \"" + type + "\" (uniform_grid | points)");
  }

  PartitionOptions popts;
  popts.tau = tau;
  popts.seed = seed;
  popts.ctx = ExecContext{opts.threads};

  PartitionResult part;
  try {
    part = polynomial_partition(cloud, D, n, popts);
  } catch (const PartitionFailure& e) {
    art.write_json("balance.json", {{"failed", true}, {"message", e.what()}});
    throw;
  }

  art.write_json("partition.json", partition_to_json(part));

  const auto ncells = static_cast<double>(std::size_t{1} << part.S);
  const double target = part.total_mass / ncells;
  double max_mass = 0.0, min_mass = std::numeric_limits<double>::infinity();
  for (const auto& c : part.cells) {
    max_mass = std::max(max_mass, c.mass);
    min_mass = std::min(min_mass, c.mass);
  }
  const double band_lo = target * std::pow(1.0 - tau, part.S);
  const double band_hi = target * std::pow(1.0 + tau, part.S);
  const bool within = part.degenerate || (min_mass >= band_lo && max_mass <= band_hi);

  json bal;
  bal["failed"] = false;
  bal["degenerate"] = part.degenerate;
  bal["cells"] = part.cells.size();
  bal["total_mass"] = part.total_mass;
  bal["wall_mass"] = part.wall_mass;
  bal["target"] = target;
  bal["band_lo"] = band_lo;
  bal["band_hi"] = band_hi;
  bal["max_mass"] = max_mass;
  bal["min_mass"] = min_mass;
  bal["tau"] = tau;
  bal["within_band"] = within;
  art.write_json("balance.json", bal);
  return within ? 0 : 1;
}

inline int cmd_estimate(const json& doc, Artifacts& art, const CmdOptions& opts,
                        std::uint64_t seed) {
  const Cursor root(doc);
  ExperimentConfig cfg;
  cfg.system = system_from_config(root.at("system"));
  cfg.p = root.at("p").as_number();
  cfg.R_schedule = root.at("R_schedule").as_numbers();
  cfg.trials = root.at("trials").as_int();
  cfg.seed = seed;
  cfg.family = cmd_detail::family_at(root.has("family") ? root.at("family")
                                                        : Cursor(json("random_phases")));
  cfg.density_h = root.get_or("density_h", cfg.density_h);
  cfg.quad_dx = root.get_or("quad_dx", cfg.quad_dx);
  cfg.cert_samples = root.get_or("cert_samples", cfg.cert_samples);
  cfg.delta = root.get_or("delta", cfg.delta);
  cfg.delta0 = root.get_or("delta0", cfg.delta0);
  cfg.delta1 = root.get_or("delta1", cfg.delta1);
  cfg.gamma0 = root.get_or("gamma0", cfg.gamma0);
  cfg.ctx = ExecContext{opts.threads};

  const auto rep = measure_A(cfg);

  art.write_json("estimate.json", estimate_to_json(rep, doc));
  {
    std::ostringstream csv;
    estimate_csv(csv, rep);
    art.write_text("estimate.csv", csv.str());
  }
  if (opts.plot || root.get_or("plot", false))
    art.write_text("plot.svg", svg_loglog(rep, "A(R), p = " + csv_num(cfg.p)));
  return 0;
}

// Validates the discriminator, applies the seed override, dispatches, and
// writes the manifest even when the command fails its contract.
inline int run_command(const std::string& task, json doc, const CmdOptions& opts) {
  {
    const Cursor root(doc);
    const auto declared = root.at("task").as_string();
    if (declared != task)
      root.at("task").fail("declares \"" + declared + "\" but the subcommand is \"" + task +
                           "\"");
    if (root.has("seed")) (void)root.at("seed").as_uint64();
  }
  if (opts.seed_override) doc["seed"] = *opts.seed_override;
  const std::uint64_t seed = cmd_detail::effective_seed(doc);

  RunManifest man;
  man.task = task;
  man.seed = seed;
  man.config_echo = doc.dump();
  man.started = iso8601_utc_now();

  Artifacts art(opts.out_dir);
  int code = 0;
  std::string failure;
  try {
    if (task == "geometry")
      code = cmd_geometry(doc, art, opts, seed);
    else if (task == "decompose")
      code = cmd_decompose(doc, art, opts, seed);
    else if (task == "partition")
      code = cmd_partition(doc, art, opts, seed);
    else if (task == "estimate")
      code = cmd_estimate(doc, art, opts, seed);
    else
      Cursor(doc).at("task").fail("unknown task \"" + task + "\"");
  } catch (const DegenerateGeometry& e) {
    failure = e.what();
    code = 1;
  } catch (const PartitionFailure& e) {
    failure = e.what();
    code = 1;
  }

  man.finished = iso8601_utc_now();
  man.outputs = art.names();
  {
    std::ofstream out(opts.out_dir / "manifest.json", std::ios::binary);
    out << man.to_json().dump(2) << "\n";
    require(out.good(), "cannot write the run manifest");
  }
  if (!failure.empty()) std::cerr << failure << "\n";
  return code;
}

}  // namespace mlr
