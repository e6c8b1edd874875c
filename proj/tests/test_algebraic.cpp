#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <queue>
#include <set>
#include <vector>

#include "mlr/algebraic/system.hpp"
#include "mlr/algebraic/variety.hpp"
#include "oracles.hpp"

using namespace mlr;
using Catch::Approx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Domain box2(double lo, double hi) {
  const double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
  return Domain::box_at(v2(c, c), v2(hw, hw));
}

// x^2 + y^2 - 1 shifted to center (cx, cy).
Polynomial circle_poly(double cx, double cy) {
  return Polynomial::monomial({2, 0}, 1.0) + Polynomial::monomial({0, 2}, 1.0) +
         Polynomial::monomial({1, 0}, -2.0 * cx) + Polynomial::monomial({0, 1}, -2.0 * cy) +
         Polynomial::constant(2, cx * cx + cy * cy - 1.0);
}

// Dense quadratic a0 + a1 x + a2 y + a3 x^2 + a4 xy + a5 y^2.
Polynomial quadratic_from(const std::array<double, 6>& a) {
  return Polynomial::constant(2, a[0]) + Polynomial::monomial({1, 0}, a[1]) +
         Polynomial::monomial({0, 1}, a[2]) + Polynomial::monomial({2, 0}, a[3]) +
         Polynomial::monomial({1, 1}, a[4]) + Polynomial::monomial({0, 2}, a[5]);
}

double eval_quadratic(const std::array<double, 6>& a, double x, double y) {
  return a[0] + a[1] * x + a[2] * y + a[3] * x * x + a[4] * x * y + a[5] * y * y;
}

// Independent root finder for a pair of plane quadratics: mark every res-cell
// of the box where both polynomials change sign among the four corners,
// cluster marked cells (8-neighbour flood fill), then polish each cluster
// centroid with a long-double Newton iteration and keep the roots that stay
// inside the cluster's neighbourhood. Detection is purely sign-based, so the
// oracle shares no machinery with the library's seeded Gauss-Newton route.
std::vector<Vec> scan_quadratic_roots(const std::array<double, 6>& p, const std::array<double, 6>& q,
                                      double lo, double hi, double res) {
  const int N = static_cast<int>(std::lround((hi - lo) / res));
  const auto node = [&](int i) { return lo + (hi - lo) * static_cast<double>(i) / N; };
  std::vector<std::int8_t> sp(static_cast<std::size_t>(N + 1) * (N + 1)), sq(sp.size());
  for (int j = 0; j <= N; ++j) {
    const double y = node(j);
    for (int i = 0; i <= N; ++i) {
      const double x = node(i);
      const std::size_t at = static_cast<std::size_t>(j) * (N + 1) + i;
      sp[at] = eval_quadratic(p, x, y) >= 0.0 ? 1 : -1;
      sq[at] = eval_quadratic(q, x, y) >= 0.0 ? 1 : -1;
    }
  }
  const auto mixed = [&](const std::vector<std::int8_t>& s, int i, int j) {
    const std::size_t a = static_cast<std::size_t>(j) * (N + 1) + i;
    const std::int8_t s00 = s[a], s10 = s[a + 1], s01 = s[a + N + 1], s11 = s[a + N + 2];
    return !(s00 == s10 && s00 == s01 && s00 == s11);
  };
  std::vector<std::uint8_t> marked(static_cast<std::size_t>(N) * N, 0);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (mixed(sp, i, j) && mixed(sq, i, j)) marked[static_cast<std::size_t>(j) * N + i] = 1;

  std::vector<Vec> roots;
  std::vector<std::uint8_t> seen(marked.size(), 0);
  for (int j0 = 0; j0 < N; ++j0)
    for (int i0 = 0; i0 < N; ++i0) {
      const std::size_t at0 = static_cast<std::size_t>(j0) * N + i0;
      if (!marked[at0] || seen[at0]) continue;
      double ci = 0.0, cj = 0.0, count = 0.0;
      double bi_lo = N, bi_hi = 0, bj_lo = N, bj_hi = 0;
      std::queue<std::pair<int, int>> bfs;
      bfs.push({i0, j0});
      seen[at0] = 1;
      while (!bfs.empty()) {
        const auto [i, j] = bfs.front();
        bfs.pop();
        ci += i + 0.5;
        cj += j + 0.5;
        count += 1.0;
        bi_lo = std::min(bi_lo, double(i));
        bi_hi = std::max(bi_hi, double(i));
        bj_lo = std::min(bj_lo, double(j));
        bj_hi = std::max(bj_hi, double(j));
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) {
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= N || jj >= N) continue;
            const std::size_t at = static_cast<std::size_t>(jj) * N + ii;
            if (marked[at] && !seen[at]) {
              seen[at] = 1;
              bfs.push({ii, jj});
            }
          }
      }
      long double x = node(0) + (hi - lo) * (ci / count) / N;
      long double y = node(0) + (hi - lo) * (cj / count) / N;
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const long double f = p[0] + p[1] * x + p[2] * y + p[3] * x * x + p[4] * x * y + p[5] * y * y;
        const long double g = q[0] + q[1] * x + q[2] * y + q[3] * x * x + q[4] * x * y + q[5] * y * y;
        if (std::abs((double)f) < 1e-12 && std::abs((double)g) < 1e-12) {
          ok = true;
          break;
        }
        const long double fx = p[1] + 2 * p[3] * x + p[4] * y, fy = p[2] + p[4] * x + 2 * p[5] * y;
        const long double gx = q[1] + 2 * q[3] * x + q[4] * y, gy = q[2] + q[4] * x + 2 * q[5] * y;
        const long double det = fx * gy - fy * gx;
        if (std::abs((double)det) < 1e-14) break;
        x -= (f * gy - g * fy) / det;
        y -= (g * fx - f * gx) / det;
      }
      if (!ok) continue;
      const double pad = 3.0 * res;
      if (x < node(0) + (hi - lo) * bi_lo / N - pad || x > node(0) + (hi - lo) * (bi_hi + 1) / N + pad)
        continue;
      if (y < node(0) + (hi - lo) * bj_lo / N - pad || y > node(0) + (hi - lo) * (bj_hi + 1) / N + pad)
        continue;
      bool dup = false;
      for (const auto& r : roots)
        if (std::hypot(r[0] - (double)x, r[1] - (double)y) < 1e-6) dup = true;
      if (!dup) roots.push_back(v2((double)x, (double)y));
    }
  return roots;
}

// Largest distance from any closed-form circle point to the sample set.
double circle_cover_radius(const std::vector<Vec>& sample, int probes) {
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    const double t = 2.0 * M_PI * k / probes;
    const Vec z = v2(std::cos(t), std::sin(t));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : sample) best = std::min(best, (s - z).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

// g_w by an independent route: central finite differences for the gradients
// (long double, exact to O(h^2) and h^2-free for quadratics) and a cofactor
// determinant with the w-basis rows appended after the gradient rows.
double fd_wedge_with_basis(const PolySystem& sys, const std::vector<double>& w,
                           const std::vector<std::vector<int>>& basis_sets, const Vec& x) {
  const int n = sys.ambient_dim, m = sys.count();
  const double h = 1e-5;
  std::vector<std::vector<long double>> grads(static_cast<std::size_t>(m),
                                              std::vector<long double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (static_cast<long double>(sys.polys[static_cast<std::size_t>(i)].eval(xp)) -
           static_cast<long double>(sys.polys[static_cast<std::size_t>(i)].eval(xm))) /
          (2.0L * h);
    }
  long double total = 0.0L;
  for (std::size_t k = 0; k < basis_sets.size(); ++k) {
    if (w[k] == 0.0) continue;
    std::vector<std::vector<long double>> rows = grads;
    for (int axis : basis_sets[k]) {
      std::vector<long double> e(static_cast<std::size_t>(n), 0.0L);
      e[static_cast<std::size_t>(axis)] = 1.0L;
      rows.push_back(e);
    }
    total += w[k] * oracle::det_cofactor(rows);
  }
  return static_cast<double>(total);
}

}  // namespace

TEST_CASE("polynomial systems hold stated degrees and reject bad shapes") {
  const auto circ = circle_poly(0.0, 0.0);
  auto sys = make_system(2, {circ});
  CHECK(sys.ambient_dim == 2);
  CHECK(sys.count() == 1);
  CHECK(sys.degrees == std::vector<int>{2});
  CHECK(sys.bezout_bound() == 2);

  // Degree sorting: a cubic listed before a linear ends up after it.
  auto cubic = Polynomial::monomial({3, 0, 0}, 1.0) + Polynomial::constant(3, -0.5);
  auto plane = Polynomial::linear(3, 2) + Polynomial::constant(3, -0.3);
  auto two = make_system(3, {cubic, plane});
  CHECK(two.degrees == std::vector<int>{1, 3});
  CHECK(two.bezout_bound() == 3);
  CHECK(two.polys[0].degree() == 1);

  const Vec p = v3(0.4, -0.2, 0.7);
  CHECK(two.eval(p)[0] == Approx(0.4).margin(1e-15));
  CHECK(two.eval(p)[1] == Approx(0.4 * 0.4 * 0.4 - 0.5).margin(1e-15));
  const Mat J = two.jacobian(p);
  CHECK(J.rows() == 2);
  CHECK(J(0, 2) == Approx(1.0));
  CHECK(J(1, 0) == Approx(3.0 * 0.16).margin(1e-12));

  CHECK_THROWS_AS(make_system(1, {circ, circ}), InvalidInput);       // m > n
  CHECK_THROWS_AS(make_system(3, {circ}), InvalidInput);             // nvars mismatch
  CHECK_THROWS_AS(make_system(2, std::vector<Polynomial>{}), InvalidInput);
}

TEST_CASE("variety sampler covers the circle and respects residual bounds") {
  const auto sys = make_system(2, {circle_poly(0.0, 0.0)});
  const auto sample = variety_sampler(sys, box2(-2.0, 2.0), 0.05);

  REQUIRE(sample.points.size() >= 100);
  CHECK(sample.spacing == Approx(0.05));
  for (const auto& z : sample.points) {
    CHECK(std::abs(z[0] * z[0] + z[1] * z[1] - 1.0) <= 1e-8);
    CHECK(sys.max_residual(z) <= 1e-8);
  }
  // Two-sided closeness to the closed-form circle: every sample sits on the
  // circle (residual), and every circle point has a sample within the seeding
  // resolution.
  CHECK(circle_cover_radius(sample.points, 5000) <= 0.05);

  // Frames and margins are filled in and consistent: |grad| = 2 on the unit
  // circle, so the normalized margin is 1 at every point.
  REQUIRE(sample.frames.size() == sample.points.size());
  REQUIRE(sample.margins.size() == sample.points.size());
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    CHECK(sample.frames[i].rows() == 1);
    CHECK(sample.frames[i].row(0).norm() == Approx(2.0).margin(1e-6));
    CHECK(sample.margins[i] == Approx(1.0).margin(1e-6));
  }

  // Dedup: no two accepted points closer than half the grid resolution.
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample.points.size(); ++i)
    for (std::size_t j = i + 1; j < sample.points.size(); ++j)
      closest = std::min(closest, (sample.points[i] - sample.points[j]).norm());
  CHECK(closest > 0.025);
}

TEST_CASE("variety sampler trivial cases: hyperplane and empty variety") {
  const auto plane = make_system(2, {Polynomial::linear(2, 0)});
  const auto ps = variety_sampler(plane, box2(-1.0, 1.0), 0.1);
  REQUIRE(!ps.points.empty());
  for (const auto& z : ps.points) CHECK(std::abs(z[0]) <= 1e-8);

  const auto empty_sys = make_system(2, {circle_poly(0.0, 0.0) + Polynomial::constant(2, 2.0)});
  const auto es = variety_sampler(empty_sys, box2(-2.0, 2.0), 0.1);
  CHECK(es.points.empty());
  CHECK(!es.diagnostics.empty());
}

TEST_CASE("tci check: circle passes with unit margin, xy fails at the origin") {
  const auto circ = make_system(2, {circle_poly(0.0, 0.0)});
  const auto rc = tci_check(circ, box2(-2.0, 2.0), 0.05);
  CHECK(rc.is_tci);
  CHECK(!rc.vacuous);
  CHECK(rc.min_margin == Approx(1.0).margin(1e-3));

  const auto xy = make_system(2, {Polynomial::monomial({1, 1}, 1.0)});
  const auto rx = tci_check(xy, box2(-1.0, 1.0), 0.05);
  CHECK(!rx.is_tci);
  CHECK(rx.min_margin <= 1e-6);
  CHECK(rx.witness.norm() <= 0.05);

  // Generic shift rescues transversality; sampler run at the stated fine
  // resolution for one draw, coarser for the remaining ones.
  CounterRng rng(941);
  for (int k = 0; k < 4; ++k) {
    double c0 = rng.uniform(static_cast<std::uint64_t>(k), 1e-4, 1e-2);
    if (rng.bits(100 + static_cast<std::uint64_t>(k)) & 1) c0 = -c0;
    const auto shifted = make_system(2, {Polynomial::monomial({1, 1}, 1.0) + Polynomial::constant(2, c0)});
    const auto rs = tci_check(shifted, box2(-1.0, 1.0), k == 0 ? 1e-3 : 5e-3);
    CHECK(rs.is_tci);
    CHECK(rs.min_margin > 1e-6);
  }

  // Scalar invariance: margins are gradient-normalized.
  const auto scaled = make_system(2, {circle_poly(0.0, 0.0).scaled(137.0)});
  const auto rs = tci_check(scaled, box2(-2.0, 2.0), 0.05);
  CHECK(rs.min_margin == Approx(rc.min_margin).margin(1e-12));

  // Empty variety in the region: vacuously true, flagged.
  const auto far_sys = make_system(2, {circle_poly(10.0, 10.0)});
  const auto rf = tci_check(far_sys, box2(-2.0, 2.0), 0.1);
  CHECK(rf.is_tci);
  CHECK(rf.vacuous);
}

TEST_CASE("zero dimensional systems: circle pairs against closed forms") {
  const auto sys = make_system(2, {circle_poly(0.0, 0.0), circle_poly(1.0, 0.0)});
  const auto pts = zero_dim_count(sys, box2(-2.0, 2.0), 0.05);
  REQUIRE(pts.size() == 2);
  // Intersection of |x|=1 and |x-e1|=1: x = 1/2, y = +-sqrt(3)/2.
  const double s3 = std::sqrt(3.0) / 2.0;
  std::vector<Vec> expect{v2(0.5, -s3), v2(0.5, s3)};
  for (const auto& e : expect) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) best = std::min(best, (p - e).norm());
    CHECK(best <= 1e-6);
  }

  const auto far_pair = make_system(2, {circle_poly(0.0, 0.0), circle_poly(3.0, 0.0)});
  CHECK(zero_dim_count(far_pair, box2(-5.0, 5.0), 0.1).empty());

  CHECK_THROWS_AS(zero_dim_count(make_system(2, {circle_poly(0.0, 0.0)}), box2(-2.0, 2.0), 0.1),
                  InvalidInput);  // m != n
}

TEST_CASE("zero dimensional systems: random quadratic pairs against the sign scan") {
  CounterRng rng(5107);
  int nonempty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto stream = rng.stream(static_cast<std::uint64_t>(trial));
    std::array<double, 6> a{}, b{};
    for (int i = 0; i < 6; ++i) {
      a[i] = stream.gaussian(static_cast<std::uint64_t>(i));
      b[i] = stream.gaussian(static_cast<std::uint64_t>(6 + i));
      // Dense: keep every monomial active.
      if (std::abs(a[i]) < 0.05) a[i] = a[i] < 0 ? -0.05 : 0.05;
      if (std::abs(b[i]) < 0.05) b[i] = b[i] < 0 ? -0.05 : 0.05;
    }
    const auto sys = make_system(2, {quadratic_from(a), quadratic_from(b)});
    const auto pts = zero_dim_count(sys, box2(-1.0, 1.0), 0.05);
    CHECK(pts.size() <= 4);  // Bezout for two quadratics

    const auto scan = scan_quadratic_roots(a, b, -1.0, 1.0, 1e-3);
    // Compare away from the box boundary, where inclusion is resolution
    // dependent on both routes.
    std::vector<Vec> inner_pts, inner_scan;
    for (const auto& p : pts)
      if (std::abs(p[0]) < 0.95 && std::abs(p[1]) < 0.95) inner_pts.push_back(p);
    for (const auto& s : scan)
      if (std::abs(s[0]) < 0.95 && std::abs(s[1]) < 0.95) inner_scan.push_back(s);
    REQUIRE(inner_pts.size() == inner_scan.size());
    for (const auto& s : inner_scan) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : inner_pts) best = std::min(best, (p - s).norm());
      CHECK(best <= 1e-6);
    }
    if (!inner_scan.empty()) ++nonempty;
  }
  CHECK(nonempty >= 30);  // the comparison is not vacuous
}

TEST_CASE("appending the wedge polynomial g_w") {
  const auto circ = make_system(2, {circle_poly(0.0, 0.0)});

  SECTION("m = n-1 determinant with w = e1 gives -2y exactly") {
    const auto sys = make_zw(circ, {1.0, 0.0});
    REQUIRE(sys.count() == 2);
    // The appended polynomial is det of rows (grad P, w): [2x 2y; 1 0] = -2y.
    const Polynomial& g = sys.polys[0].degree() == 1 ? sys.polys[0] : sys.polys[1];
    REQUIRE(g.terms().size() == 1);
    CHECK(g.terms()[0].exp == std::vector<int>{0, 1});
    CHECK(g.terms()[0].coeff == Approx(-2.0).margin(1e-14));
    CHECK(g.degree() <= 2);  // stated bound sum deg P_i
  }

  SECTION("zero multivector gives the zero polynomial") {
    const auto sys = make_zw(circ, {0.0, 0.0});
    REQUIRE(sys.count() == 2);
    CHECK((sys.polys[0].is_zero() || sys.polys[1].is_zero()));
  }

  SECTION("wrong grade is rejected") {
    CHECK_THROWS_AS(make_zw(circ, {1.0, 0.0, 0.0}), InvalidInput);
    const auto square = make_system(2, {circle_poly(0.0, 0.0), circle_poly(0.5, 0.0)});
    CHECK_THROWS_AS(make_zw(square, {1.0, 0.0}), InvalidInput);  // m = n leaves no room
  }

  SECTION("pointwise agreement with the finite-difference wedge determinant") {
    // m=1 in R^3 (w has grade 2, three basis components) and m=2 in R^3
    // (w has grade 1). Both checked at random points off the variety.
    auto sphere = Polynomial::monomial({2, 0, 0}, 1.0) + Polynomial::monomial({0, 2, 0}, 1.0) +
                  Polynomial::monomial({0, 0, 2}, 1.0) + Polynomial::constant(3, -1.0);
    auto tilt = Polynomial::linear(3, 2) + Polynomial::monomial({1, 1, 0}, 0.7) +
                Polynomial::constant(3, -0.3);
    const auto one = make_system(3, {sphere});
    const auto two = make_system(3, {sphere, tilt});
    const std::vector<std::vector<int>> pairs{{0, 1}, {0, 2}, {1, 2}};
    const std::vector<std::vector<int>> singles{{0}, {1}, {2}};

    CounterRng rng(331);
    std::vector<double> w2(3), w1(3);
    for (int i = 0; i < 3; ++i) {
      w2[static_cast<std::size_t>(i)] = rng.gaussian(static_cast<std::uint64_t>(i));
      w1[static_cast<std::size_t>(i)] = rng.gaussian(static_cast<std::uint64_t>(10 + i));
    }
    const auto sys1 = make_zw(one, w2);
    const auto sys2 = make_zw(two, w1);
    // Systems keep ascending degree order: the degree-1 wedge of the sphere
    // sorts first, while the degree tie in the pair system appends last.
    const Polynomial& g1 = sys1.polys.front();
    const Polynomial& g2 = sys2.polys.back();
    CHECK(g1.degree() <= 2);
    CHECK(g2.degree() <= 4);

    for (int k = 0; k < 100; ++k) {
      Vec x(3);
      for (int i = 0; i < 3; ++i)
        x[i] = rng.uniform(static_cast<std::uint64_t>(100 + 3 * k + i), -1.5, 1.5);
      const double r1 = fd_wedge_with_basis(one, w2, pairs, x);
      const double r2 = fd_wedge_with_basis(two, w1, singles, x);
      CHECK(g1.eval(x) == Approx(r1).margin(1e-10 * std::max(1.0, std::abs(r1))));
      CHECK(g2.eval(x) == Approx(r2).margin(1e-10 * std::max(1.0, std::abs(r2))));
    }
  }

  SECTION("generic w keeps the circle system transverse, 10 of 10 draws") {
    CounterRng rng(77);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> w{rng.gaussian(static_cast<std::uint64_t>(2 * k)),
                            rng.gaussian(static_cast<std::uint64_t>(2 * k + 1))};
      const auto sys = make_zw(circ, w);
      const auto rep = tci_check(sys, box2(-2.0, 2.0), 0.02);
      CHECK(rep.is_tci);
      CHECK(!rep.vacuous);  // Z_w of the circle is the antipodal point pair along w
    }
  }
}
