#include <catch2/catch_amalgamated.hpp>

#include "mlr/base.hpp"
#include "mlr/geometry/domain.hpp"
#include "mlr/polynomial.hpp"
#include "mlr/rational.hpp"

using namespace mlr;

TEST_CASE("counter rng is a pure function of seed, stream and counter") {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  for (std::uint64_t c : {0ull, 1ull, 1000ull, 123456789ull}) {
    CHECK(a.bits(c) == b.bits(c));
    CHECK(a.unit(c) == b.unit(c));
  }
  CounterRng other_stream(42, 8);
  CHECK(a.bits(5) != other_stream.bits(5));
  CounterRng other_seed(43, 7);
  CHECK(a.bits(5) != other_seed.bits(5));
  CHECK(a.stream(9).bits(3) == b.stream(9).bits(3));
  CHECK(a.stream(9).bits(3) != a.stream(8).bits(3));
  CHECK(a.stream("walk").bits(0) == b.stream("walk").bits(0));
}

TEST_CASE("counter rng uniform and gaussian have sane statistics") {
  CounterRng rng(2024, 0);
  double sum = 0.0, sumsq = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.unit(static_cast<std::uint64_t>(i));
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
  CHECK(std::abs(sumsq / n - 1.0 / 3.0) < 0.01);

  double gsum = 0.0, gsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian(static_cast<std::uint64_t>(i));
    gsum += g;
    gsq += g * g;
  }
  CHECK(std::abs(gsum / n) < 0.03);
  CHECK(std::abs(gsq / n - 1.0) < 0.05);

  const cplx p = rng.unit_phase(77);
  CHECK(std::abs(std::abs(p) - 1.0) < 1e-12);
}

TEST_CASE("uniform respects bounds") {
  CounterRng rng(1, 3);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(static_cast<std::uint64_t>(i), -2.5, 7.0);
    REQUIRE(x >= -2.5);
    REQUIRE(x < 7.0);
  }
}

TEST_CASE("parallel_chunks covers the range once and is thread-count independent") {
  const std::int64_t total = 10001;
  std::vector<int> hits(total, 0);
  ExecContext one{1};
  parallel_chunks(one, total, 97, [&](std::int64_t, std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) hits[static_cast<std::size_t>(i)]++;
  });
  for (int h : hits) REQUIRE(h == 1);

  // A reduction combined in chunk order must not depend on the thread count.
  auto reduce = [&](int threads) {
    ExecContext ctx{threads};
    const std::int64_t chunk = 97;
    const std::int64_t nchunks = (total + chunk - 1) / chunk;
    std::vector<double> part(static_cast<std::size_t>(nchunks), 0.0);
    parallel_chunks(ctx, total, chunk, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
      double s = 0.0;
      for (std::int64_t i = b; i < e; ++i) s += std::sin(0.001 * static_cast<double>(i));
      part[static_cast<std::size_t>(c)] = s;
    });
    NeumaierSum acc;
    for (double p : part) acc.add(p);
    return acc.value();
  };
  CHECK(reduce(1) == reduce(3));
}

TEST_CASE("parallel_argmin matches a serial scan and breaks ties at the lowest index") {
  auto score = [](std::int64_t i) {
    const double x = static_cast<double>(i % 1000);
    return std::abs(x - 500.0);
  };
  ExecContext ctx{2};
  const auto [v, idx] = parallel_argmin(ctx, 5000, score);
  CHECK(v == 0.0);
  CHECK(idx == 500);  // 1500, 2500, ... score the same
}

TEST_CASE("parallel_chunks propagates exceptions") {
  ExecContext ctx{2};
  CHECK_THROWS_AS(parallel_chunks(ctx, 100, 10,
                                  [&](std::int64_t c, std::int64_t, std::int64_t) {
                                    if (c == 3) throw DomainViolation("boom");
                                  }),
                  DomainViolation);
}

TEST_CASE("neumaier summation keeps cancelled tails") {
  NeumaierSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.value() == 2.0);
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("binom is exact for moderate arguments") {
  CHECK(binom(0, 0) == 1);
  CHECK(binom(10, 5) == 252);
  CHECK(binom(52, 5) == 2598960);
  CHECK(binom(5, 9) == 0);
  CHECK(binom(6, 3) == 20);
}

TEST_CASE("linspace includes both endpoints") {
  const auto v = linspace(-1.0, 2.0, 7);
  REQUIRE(v.size() == 7);
  CHECK(v.front() == -1.0);
  CHECK(v.back() == 2.0);
  CHECK(std::abs(v[2] - 0.0) < 1e-15);
}

TEST_CASE("errors carry their category prefix") {
  try {
    require(false, "bad argument");
    FAIL("unreachable");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).rfind("invalid-input: ", 0) == 0);
  }
  CHECK_THROWS_AS(throw DegenerateGeometry("x"), std::runtime_error);
}

TEST_CASE("rational arithmetic is exact and normalized") {
  const Rational half(2, 4);
  CHECK(half.num() == 1);
  CHECK(half.den() == 2);
  CHECK(half.str() == "1/2");
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK((Rational(2, 3) * Rational(9, 4)) == Rational(3, 2));
  CHECK((Rational(1, 3) - Rational(1, 2)) == Rational(-1, 6));
  CHECK((Rational(5, 3) / Rational(10, 9)) == Rational(3, 2));
  CHECK(Rational(1, 3) < Rational(2, 5));
  CHECK(Rational(-1, 2) < Rational(1, 3));
  CHECK(Rational(7, 1).str() == "7");
  CHECK(std::abs(Rational(1, 3).value() - 1.0 / 3.0) < 1e-15);
  // Comparisons stay exact where doubles round: 10^9/(10^9+1) vs (10^9-1)/10^9.
  const std::int64_t b = 1000000000;
  CHECK(Rational(b - 1, b) < Rational(b, b + 1));
  CHECK_THROWS_AS(Rational(1, 0), InvalidInput);
}

TEST_CASE("polynomial evaluation, products and partials agree") {
  // p = (x + 2y)^2 + 3
  const auto x = Polynomial::linear(2, 0, 1.0);
  const auto y = Polynomial::linear(2, 1, 2.0);
  const auto p = (x + y) * (x + y) + Polynomial::constant(2, 3.0);
  Vec at(2);
  at << 1.5, -0.25;
  const double direct = std::pow(1.5 + 2.0 * -0.25, 2) + 3.0;
  CHECK(std::abs(p.eval(at) - direct) < 1e-14);
  CHECK(p.degree() == 2);

  const auto px = p.partial(0);
  const double fd = (p.eval((Vec(2) << 1.5 + 1e-6, -0.25).finished()) -
                     p.eval((Vec(2) << 1.5 - 1e-6, -0.25).finished())) /
                    2e-6;
  CHECK(std::abs(px.eval(at) - fd) < 1e-7);

  const auto zero = p - p;
  CHECK(zero.is_zero());
  CHECK_THROWS_AS(p + Polynomial::constant(3, 1.0), InvalidInput);
}

TEST_CASE("polynomial terms stay canonical under mixed construction orders") {
  std::vector<int> e1{2, 0}, e2{0, 1};
  const auto a = Polynomial::monomial(e1, 1.0) + Polynomial::monomial(e2, 2.0);
  const auto b = Polynomial::monomial(e2, 2.0) + Polynomial::monomial(e1, 1.0);
  REQUIRE(a.terms().size() == b.terms().size());
  for (std::size_t i = 0; i < a.terms().size(); ++i) {
    CHECK(a.terms()[i].exp == b.terms()[i].exp);
    CHECK(a.terms()[i].coeff == b.terms()[i].coeff);
  }
}
