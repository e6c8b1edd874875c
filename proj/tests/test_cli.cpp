// End-to-end checks of the command line front end. Every command runs as a
// child process of the built binary (path in MLR_CLI); artifacts are parsed
// back and compared against in-process library calls or against independent
// re-derivations (CSV grammar, FNV hash, cell membership from serialized
// cuts). Exit codes follow the 0/1/2 contract.

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "mlr/algebraic/serialize.hpp"
#include "mlr/experiments/measure.hpp"
#include "mlr/geometry/certificates.hpp"
#include "mlr/wavepackets/decompose.hpp"

using Catch::Approx;
using nlohmann::json;
namespace fs = std::filesystem;
using namespace mlr;

namespace {

// --- process harness --------------------------------------------------------

struct RunResult {
  int exit = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << bytes;
}

const char* cli_path() {
  const char* p = std::getenv("MLR_CLI");
  REQUIRE(p != nullptr);
  return p;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::path("cli_work") / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + cli_path() + "\" " + args + " >\"" + so.string() +
                          "\" 2>\"" + se.string() + "\"";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  REQUIRE(WIFEXITED(rc));
  r.exit = WEXITSTATUS(rc);
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  spit(p, doc.dump(2) + "\n");
  return p;
}

RunResult run_task(const json& doc, const fs::path& dir, const std::string& extra = "") {
  const fs::path cfg = write_config(dir, doc);
  const std::string task = doc.value("task", "estimate");
  return run_cli(task + " --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"" +
                     (extra.empty() ? "" : " " + extra),
                 dir);
}

// --- independent oracles ----------------------------------------------------

std::uint64_t o_fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Strict RFC-4180 scan over raw bytes: records end CRLF, quoted fields may
// hold separators and doubled quotes, bare CR or LF never appear elsewhere.
std::vector<std::vector<std::string>> o_csv(const std::string& bytes) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, in_field_quotes = false;
  std::size_t i = 0;
  while (i < bytes.size()) {
    const char c = bytes[i];
    if (in_field_quotes) {
      REQUIRE(i < bytes.size());
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        in_field_quotes = false;
        ++i;
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    if (c == '"') {
      REQUIRE(field.empty());  // quotes only open at field start
      quoted = true;
      in_field_quotes = true;
      ++i;
      continue;
    }
    if (c == ',') {
      row.push_back(field);
      field.clear();
      quoted = false;
      ++i;
      continue;
    }
    if (c == '\r') {
      REQUIRE(i + 1 < bytes.size());
      REQUIRE(bytes[i + 1] == '\n');
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      quoted = false;
      i += 2;
      continue;
    }
    REQUIRE(c != '\n');  // LF only as part of CRLF
    field += c;
    ++i;
  }
  (void)quoted;
  REQUIRE(field.empty());  // final record must end with CRLF
  REQUIRE(row.empty());
  return rows;
}

// Re-derives cell membership from the serialized cuts and shifts, mirroring
// the published convention: v = q_s(x) + shift_s, |v| <= 1e-9 max|coeff| is
// wall, v > 0 sets bit s-1.
std::vector<double> o_cell_masses(const json& part, const std::vector<Vec>& pts,
                                  const std::vector<double>& wts, double* wall_out) {
  const int n = part.at("n").get<int>();
  const int S = part.at("S").get<int>();
  std::vector<Polynomial> polys;
  std::vector<double> thr;
  for (const auto& pj : part.at("polys")) {
    polys.push_back(poly_from_json(n, pj));
    thr.push_back(1e-9 * polys.back().max_abs_coeff());
  }
  const auto shifts = part.at("shifts").get<std::vector<double>>();
  std::vector<double> masses(static_cast<std::size_t>(1) << S, 0.0);
  double wall = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int cell = 0;
    bool on_wall = false;
    for (int s = 0; s < S && !on_wall; ++s) {
      const double v = polys[static_cast<std::size_t>(s)].eval(pts[i]) +
                       shifts[static_cast<std::size_t>(s)];
      if (std::abs(v) <= thr[static_cast<std::size_t>(s)])
        on_wall = true;
      else if (v > 0.0)
        cell |= 1 << s;
    }
    (on_wall ? wall : masses[static_cast<std::size_t>(cell)]) += wts[i];
  }
  if (wall_out) *wall_out = wall;
  return masses;
}

// --- shared fixtures --------------------------------------------------------

json domain_ball(std::vector<double> c, double r) {
  return {{"shape", "ball"}, {"center", c}, {"radius", r}};
}

json paraboloid_patch(int n, std::vector<double> c, double r) {
  return {{"family", "paraboloid"}, {"dim", n}, {"domain", domain_ball(std::move(c), r)}};
}

json geometry_pair_config() {
  json j;
  j["task"] = "geometry";
  j["system"] = json::array({paraboloid_patch(3, {0.0, 0.0}, 0.35),
                             paraboloid_patch(3, {0.0, 1.1}, 0.3)});
  j["samples"] = 9;
  j["localization"] = {{"patch", 1}, {"axes", {1}}, {"mu", 0.05}, {"seed_res", 16}};
  return j;
}

SurfaceSystem geometry_pair_system() {
  SurfaceSystem sys;
  sys.patches.push_back(
      make_paraboloid(3, Domain::ball_at(Eigen::Vector2d(0.0, 0.0), 0.35)));
  sys.patches.push_back(
      make_paraboloid(3, Domain::ball_at(Eigen::Vector2d(0.0, 1.1), 0.3)));
  return sys;
}

json decompose_config() {
  json j;
  j["task"] = "decompose";
  j["patch"] = paraboloid_patch(3, {0.0, 0.0}, 0.5);
  j["R"] = 16.0;
  j["delta"] = 0.05;
  j["density"] = {{"family", "random_phases"}, {"h", 0.125}};
  j["seed"] = 7;
  j["orthogonality_trials"] = 50;
  j["export_field"] = true;
  return j;
}

json estimate_config() {
  json j;
  j["task"] = "estimate";
  json dom = {{"shape", "box"}, {"center", {0.0}}, {"half_width", {0.6}}};
  j["system"] = json::array(
      {{{"family", "sphere_cap"}, {"dim", 2}, {"domain", dom}, {"radius", 1.0}}});
  j["p"] = 6.0;
  j["R_schedule"] = {8.0, 16.0};
  j["trials"] = 2;
  j["seed"] = 4242;
  j["density_h"] = 0.0625;
  j["quad_dx"] = 0.5;
  j["cert_samples"] = 9;
  return j;
}

ExperimentConfig estimate_config_native() {
  ExperimentConfig cfg;
  Vec c(1), hw(1);
  c << 0.0;
  hw << 0.6;
  cfg.system.patches.push_back(make_sphere_cap(2, Domain::box_at(c, hw), 1.0));
  cfg.p = 6.0;
  cfg.R_schedule = {8.0, 16.0};
  cfg.trials = 2;
  cfg.seed = 4242;
  cfg.density_h = 0.0625;
  cfg.quad_dx = 0.5;
  cfg.cert_samples = 9;
  return cfg;
}

void check_manifest(const fs::path& dir, const std::string& task, std::uint64_t seed) {
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("task").get<std::string>() == task);
  CHECK(m.at("seed").get<std::uint64_t>() == seed);
  CHECK(m.at("tool_version").get<std::string>() == "0.1.0");
  const std::string echo = m.at("config_echo").get<std::string>();
  std::ostringstream want;
  want << std::hex << std::setw(16) << std::setfill('0') << o_fnv1a64(echo);
  CHECK(m.at("config_hash").get<std::string>() == want.str());
  // The echo is the canonical form of the stored config document.
  CHECK(json::parse(echo).dump() == echo);
  for (const auto& f : m.at("outputs")) {
    CHECK(fs::exists(dir / f.get<std::string>()));
    CHECK(f.get<std::string>() != "manifest.json");
  }
  CHECK(!m.at("started").get<std::string>().empty());
  CHECK(!m.at("finished").get<std::string>().empty());
}

}  // namespace

TEST_CASE("geometry command certifies a paraboloid pair") {
  const auto dir = fresh_dir("geom_pair");
  const auto r = run_task(geometry_pair_config(), dir);
  CAPTURE(r.err);
  REQUIRE(r.exit == 0);

  const json cert = json::parse(slurp(dir / "certificates.json"));
  CHECK(cert.at("pass").get<bool>());

  const auto sys = geometry_pair_system();
  const auto tv = check_transversality(sys, 9);
  CHECK(cert.at("transversality").at("min").get<double>() == Approx(tv.value).epsilon(1e-12));
  CHECK(cert.at("transversality").at("certified").get<double>() > 0.0);
  CHECK(cert.at("transversality").at("grid").get<int>() == 9);

  REQUIRE(cert.at("curvature").size() == 2);
  for (int l = 1; l <= 2; ++l) {
    const auto cv = check_curvature_condition(sys, l, 9);
    const auto& row = cert.at("curvature").at(l - 1);
    CHECK(row.at("min").get<double>() == Approx(cv.value).epsilon(1e-12));
    CHECK(row.at("certified").get<double>() > 0.0);
    CHECK(row.at("patch").get<int>() == l);
  }

  const auto& loc = cert.at("localization");
  CHECK(loc.at("min_transversality").get<double>() > 0.0);
  CHECK(loc.at("min_jacobian").get<double>() > 0.0);
  CHECK(loc.at("zeros").get<int>() >= 1);
  CHECK(loc.at("c_tilde").get<double>() >= 0.0);

  check_manifest(dir, "geometry", 0);
}

TEST_CASE("geometry command exit codes") {
  SECTION("identical patches certify nothing and exit 1") {
    const auto dir = fresh_dir("geom_twin");
    json j = geometry_pair_config();
    j["system"][1] = j["system"][0];
    j.erase("localization");
    const auto r = run_task(j, dir);
    CHECK(r.exit == 1);
    const json cert = json::parse(slurp(dir / "certificates.json"));
    CHECK_FALSE(cert.at("pass").get<bool>());
    CHECK(cert.at("transversality").at("min").get<double>() <= 1e-12);
    check_manifest(dir, "geometry", 0);
  }

  SECTION("schema violations exit 2 and name the offending pointer") {
    const auto dir = fresh_dir("geom_bad");
    json j = geometry_pair_config();
    j["task"] = 5;
    const fs::path cfg = write_config(dir, j);
    const auto r =
        run_cli("geometry --config \"" + cfg.string() + "\" --out \"" + dir.string() + "\"", dir);
    CHECK(r.exit == 2);
    CHECK(r.err.find("/task") != std::string::npos);

    json k = geometry_pair_config();
    k["system"][0]["family"] = "klein_bottle";
    const auto r2 = run_task(k, dir);
    CHECK(r2.exit == 2);
    CHECK(r2.err.find("/system/0/family") != std::string::npos);

    json m = geometry_pair_config();
    m.erase("system");
    const auto r3 = run_task(m, dir);
    CHECK(r3.exit == 2);
    CHECK(r3.err.find("/system") != std::string::npos);

    spit(dir / "config.json", "{ not json");
    const auto r4 = run_cli(
        "geometry --config \"" + (dir / "config.json").string() + "\" --out \"" + dir.string() +
            "\"",
        dir);
    CHECK(r4.exit == 2);
  }
}

TEST_CASE("decompose command writes a packet inventory") {
  const auto dir = fresh_dir("decomp");
  const auto r = run_task(decompose_config(), dir);
  CAPTURE(r.err);
  REQUIRE(r.exit == 0);

  // In-process replay of the same draw is the value oracle.
  auto patch = std::make_shared<SurfacePatch>(
      make_paraboloid(3, Domain::ball_at(Eigen::Vector2d(0.0, 0.0), 0.5)));
  const auto f =
      make_family_density(patch, DensityFamily::random_phases, 0.125, 16.0, CounterRng(7), 0);
  const auto dec = decompose(f, 16.0, 0.05);

  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep.at("pass").get<bool>());
  CHECK(rep.at("packets").get<std::size_t>() == dec.packets.size());
  CHECK(rep.at("input_norm").get<double>() == Approx(dec.input_norm).epsilon(1e-12));

  bool saw_reconstruction = false, saw_orthogonality = false, saw_decay = false;
  for (const auto& row : rep.at("checks")) {
    CHECK(row.at("pass").get<bool>());
    const auto name = row.at("check").get<std::string>();
    if (name == "reconstruction") {
      saw_reconstruction = true;
      CHECK(row.at("value").get<double>() ==
            Approx(dec.reconstruction_error).margin(1e-15));
      CHECK(row.at("threshold").get<double>() == 1e-6);
    } else if (name == "orthogonality") {
      saw_orthogonality = true;
      CHECK(row.at("value").get<double>() <= 10.0);
      CHECK(row.at("trials").get<int>() == 50);
    } else if (name == "decay") {
      saw_decay = true;
      CHECK(row.at("value").get<double>() <= 1e3);
      CHECK(row.at("values").size() == 3);
    }
  }
  CHECK(saw_reconstruction);
  CHECK(saw_orthogonality);
  CHECK(saw_decay);

  // Inventory: strict RFC-4180, one row per packet, values as written.
  const auto rows = o_csv(slurp(dir / "packets.csv"));
  REQUIRE(rows.size() == dec.packets.size() + 1);
  const std::vector<std::string> want_header = {"packet", "xi_1", "xi_2", "x_1",  "x_2",
                                                "x_3",    "v_1",  "v_2",  "v_3",  "norm"};
  CHECK(rows[0] == want_header);
  for (const std::size_t pi : {std::size_t{0}, dec.packets.size() / 2}) {
    const auto& row = rows[pi + 1];
    const auto& p = dec.packets[pi];
    CHECK(std::stoul(row[0]) == pi);
    CHECK(std::stod(row[1]) == Approx(p.tube.xi[0]).margin(1e-15));
    CHECK(std::stod(row[2]) == Approx(p.tube.xi[1]).margin(1e-15));
    const Vec a = p.tube.anchor();
    CHECK(std::stod(row[3]) == Approx(a[0]).margin(1e-12));
    CHECK(std::stod(row[4]) == Approx(a[1]).margin(1e-12));
    CHECK(std::stod(row[5]) == Approx(a[2]).margin(1e-12));
    CHECK(std::stod(row[6]) == Approx(p.tube.direction[0]).margin(1e-15));
    CHECK(std::stod(row[9]) == Approx(p.norm).epsilon(1e-12));
  }

  // Exported field: sidecar shape times 16 bytes per complex sample.
  const json side = json::parse(slurp(dir / "density.json"));
  std::size_t count = 1;
  for (const auto& s : side.at("shape")) count *= s.get<std::size_t>();
  CHECK(side.at("spacing").get<double>() == Approx(0.125));
  CHECK(side.at("patch_id").get<int>() == 0);
  REQUIRE(side.at("center").size() == 2);
  CHECK(fs::file_size(dir / "density.bin") == 16 * count);

  check_manifest(dir, "decompose", 7);
}

TEST_CASE("decompose command edge cases") {
  SECTION("zero density exits 0 with an empty inventory") {
    const auto dir = fresh_dir("decomp_zero");
    json j = decompose_config();
    j["density"]["family"] = "zero";
    j["export_field"] = false;
    const auto r = run_task(j, dir);
    CAPTURE(r.err);
    CHECK(r.exit == 0);
    const auto rows = o_csv(slurp(dir / "packets.csv"));
    CHECK(rows.size() == 1);
    const json rep = json::parse(slurp(dir / "report.json"));
    CHECK(rep.at("packets").get<int>() == 0);
    CHECK(rep.at("pass").get<bool>());
  }

  SECTION("incompatible spacing exits 2") {
    const auto dir = fresh_dir("decomp_spacing");
    json j = decompose_config();
    j["delta"] = 0.5;
    const auto r = run_task(j, dir);
    CHECK(r.exit == 2);
    CHECK(!r.err.empty());
  }
}

TEST_CASE("partition command on a uniform square") {
  const auto dir = fresh_dir("part_square");
  json j;
  j["task"] = "partition";
  j["dim"] = 2;
  j["degree"] = 2;
  j["mass"] = {{"type", "uniform_grid"},
               {"box", {{"shape", "box"}, {"center", {0.5, 0.5}}, {"half_width", {0.5, 0.5}}}},
               {"per_dim", 48}};
  const auto r = run_task(j, dir);
  CAPTURE(r.err);
  REQUIRE(r.exit == 0);

  const json part = json::parse(slurp(dir / "partition.json"));
  REQUIRE(part.at("cells").size() == 4);
  const double total = part.at("total_mass").get<double>();
  CHECK(total == Approx(1.0).epsilon(1e-12));
  for (const auto& cell : part.at("cells")) {
    const double m = cell.at("mass").get<double>();
    CHECK(m >= 0.15 * total);
    CHECK(m <= 0.35 * total);
    CHECK(cell.at("sign_vector").size() == 2);
  }

  // Rebuild the cloud the same way the command does and re-derive membership
  // from the serialized cuts alone.
  std::vector<Vec> pts;
  std::vector<double> wts;
  for (int a = 0; a < 48; ++a)
    for (int b = 0; b < 48; ++b) {
      Vec x(2);
      x << (a + 0.5) / 48.0, (b + 0.5) / 48.0;
      pts.push_back(x);
      wts.push_back(1.0 / (48.0 * 48.0));
    }
  double wall = 0.0;
  const auto masses = o_cell_masses(part, pts, wts, &wall);
  CHECK(wall == Approx(part.at("wall_mass").get<double>()).margin(1e-12));
  for (std::size_t c = 0; c < 4; ++c)
    CHECK(masses[c] ==
          Approx(part.at("cells").at(c).at("mass").get<double>()).margin(1e-12));

  const json bal = json::parse(slurp(dir / "balance.json"));
  CHECK(bal.at("within_band").get<bool>());
  CHECK_FALSE(bal.at("failed").get<bool>());
  check_manifest(dir, "partition", 0);
}

TEST_CASE("partition command edge cases") {
  SECTION("an atom is reported degenerate, exit 0") {
    const auto dir = fresh_dir("part_atom");
    json j;
    j["task"] = "partition";
    j["dim"] = 2;
    j["degree"] = 2;
    j["mass"] = {{"type", "points"}, {"points", {{0.25, 0.75}}}, {"weights", {2.0}}};
    const auto r = run_task(j, dir);
    CAPTURE(r.err);
    CHECK(r.exit == 0);
    const json part = json::parse(slurp(dir / "partition.json"));
    CHECK(part.at("degenerate").get<bool>());
    CHECK(part.at("cells").at(0).at("mass").get<double>() == Approx(2.0));
  }

  SECTION("an unbalanceable mass exits 1 naming the best imbalance") {
    const auto dir = fresh_dir("part_fail");
    json j;
    j["task"] = "partition";
    j["dim"] = 2;
    j["degree"] = 2;
    j["mass"] = {{"type", "points"},
                 {"points", {{0.1, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.9, 0.9}}},
                 {"weights", {0.85, 0.05, 0.05, 0.05}}};
    const auto r = run_task(j, dir);
    CHECK(r.exit == 1);
    CHECK(r.err.find("imbalance") != std::string::npos);
    const json bal = json::parse(slurp(dir / "balance.json"));
    CHECK(bal.at("failed").get<bool>());
    check_manifest(dir, "partition", 0);
  }
}

TEST_CASE("estimate command runs a circle arc schedule deterministically") {
  const auto dir = fresh_dir("est_a");
  const json cfg = estimate_config();
  const auto r = run_task(cfg, dir, "--plot");
  CAPTURE(r.err);
  REQUIRE(r.exit == 0);

  const json rep = json::parse(slurp(dir / "estimate.json"));
  REQUIRE(rep.at("points").size() == 2);

  // Values agree exactly with an in-process run: JSON carries shortest
  // round-trip doubles, so equality is bitwise.
  const auto oracle = measure_A(estimate_config_native());
  CHECK(rep.at("slope").get<double>() == oracle.slope);
  CHECK(rep.at("intercept").get<double>() == oracle.intercept);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& pj = rep.at("points").at(i);
    CHECK(pj.at("R").get<double>() == oracle.points[i].R);
    CHECK(pj.at("A_emp").get<double>() == oracle.points[i].A_emp);
    CHECK(pj.at("argmax_trial").get<int>() == oracle.points[i].argmax_trial);
    CHECK(pj.at("converged").get<bool>() == oracle.points[i].converged);
  }
  CHECK(rep.at("transversality").at("certified").get<double>() > 0.0);
  CHECK(rep.at("config").at("seed").get<std::uint64_t>() == 4242);
  CHECK_FALSE(rep.contains("runtime_seconds"));

  const auto csv_rows = o_csv(slurp(dir / "estimate.csv"));
  REQUIRE(csv_rows.size() == 3);
  CHECK(csv_rows[0] ==
        std::vector<std::string>{"R", "A_emp", "lhs", "denom", "argmax_trial", "converged",
                                 "refined"});
  CHECK(std::stod(csv_rows[1][0]) == 8.0);
  CHECK(std::stod(csv_rows[1][1]) == oracle.points[0].A_emp);

  const std::string svg = slurp(dir / "plot.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("slope") != std::string::npos);

  check_manifest(dir, "estimate", 4242);

  SECTION("re-running the same config reproduces artifacts byte for byte") {
    const auto dir2 = fresh_dir("est_b");
    const auto r2 = run_task(cfg, dir2, "--plot");
    REQUIRE(r2.exit == 0);
    CHECK(slurp(dir2 / "estimate.json") == slurp(dir / "estimate.json"));
    CHECK(slurp(dir2 / "estimate.csv") == slurp(dir / "estimate.csv"));
    CHECK(slurp(dir2 / "plot.svg") == slurp(dir / "plot.svg"));
  }

  SECTION("a larger worker pool changes nothing") {
    const auto dir3 = fresh_dir("est_c");
    const auto r3 = run_task(cfg, dir3, "--plot --threads 3");
    REQUIRE(r3.exit == 0);
    CHECK(slurp(dir3 / "estimate.json") == slurp(dir / "estimate.json"));
  }

  SECTION("the seed flag overrides the config seed") {
    const auto dir4 = fresh_dir("est_d");
    const auto r4 = run_task(cfg, dir4, "--seed 777");
    REQUIRE(r4.exit == 0);
    const json rep4 = json::parse(slurp(dir4 / "estimate.json"));
    CHECK(rep4.at("config").at("seed").get<std::uint64_t>() == 777);
    check_manifest(dir4, "estimate", 777);
  }

  SECTION("zero trials exit 2") {
    const auto dir5 = fresh_dir("est_e");
    json bad = cfg;
    bad["trials"] = 0;
    const auto r5 = run_task(bad, dir5);
    CHECK(r5.exit == 2);
  }
}

TEST_CASE("shipped sample configs parse and the fast ones run") {
  const char* cdir = std::getenv("MLR_CONFIGS");
  REQUIRE(cdir != nullptr);
  const fs::path configs(cdir);

  for (const auto& name :
       {"geometry_pair.json", "decompose_cap.json", "partition_square.json",
        "estimate_circle.json"}) {
    const json doc = json::parse(slurp(configs / name));
    CHECK(doc.contains("task"));
  }

  const auto dir = fresh_dir("samples");
  const auto r = run_cli("geometry --config \"" + (configs / "geometry_pair.json").string() +
                             "\" --out \"" + dir.string() + "\"",
                         dir);
  CAPTURE(r.err);
  CHECK(r.exit == 0);

  const auto r2 = run_cli("partition --config \"" + (configs / "partition_square.json").string() +
                              "\" --out \"" + dir.string() + "\"",
                          dir);
  CAPTURE(r2.err);
  CHECK(r2.exit == 0);
}
