#include <doctest.h>

#include "freewalk/decomp.hpp"
#include "freewalk/walk.hpp"
#include "support.hpp"

using namespace freewalk;

namespace {

const Reals R;

bool in_valuation_ring(const Matrix<Rational>& m, std::uint32_t p) {
  for (const auto& x : m.data())
    if (x != 0 && *valuation(x, p) < 0) return false;
  return true;
}

bool padic_isometry(const Matrix<Rational>& k, std::uint32_t p) {
  return in_valuation_ring(k, p) && valuation(determinant(k), p) == 0;
}

bool orthogonal(const Matrix<double>& k, double tol = 1e-10) {
  return fwtest::max_abs_diff(Matrix<double>(k.transpose() * k), Matrix<double>::identity(k.rows())) <= tol &&
         std::abs(determinant(k) - 1) <= tol;
}

Matrix<Rational> upper(std::initializer_list<std::initializer_list<Rational>> rows) { return Matrix<Rational>(rows); }

}  // namespace

TEST_CASE("kak examples") {
  auto id = kak(R, Matrix<double>::identity(3));
  CHECK(id.a == std::vector<double>{1, 1, 1});
  CHECK(orthogonal(id.k));

  auto d = kak(R, Matrix<double>{{4, 0}, {0, 0.25}});
  CHECK(d.a[0] == doctest::Approx(4));
  CHECK(d.a[1] == doctest::Approx(0.25));
  CHECK(fwtest::max_abs_diff(d.k, Matrix<double>::identity(2)) < 1e-12);
  CHECK(fwtest::max_abs_diff(d.u, Matrix<double>::identity(2)) < 1e-12);

  const PAdicField q2(2);
  auto p = kak(q2, upper({{2, 0}, {0, Rational(1, 2)}}));
  CHECK(p.a == std::vector<Rational>{Rational(1, 2), 2});
  CHECK(q2.abs(p.a[0]) == 2);
  CHECK(padic_isometry(p.k, 2));
  CHECK(padic_isometry(p.u, 2));
  CHECK(reconstruct(p.k, p.a, p.u) == upper({{2, 0}, {0, Rational(1, 2)}}));

  auto s = kak(R, Matrix<double>{{1, 2}, {0, 1}});
  CHECK(s.a[0] == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.a[1] == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-12));

  CHECK_THROWS_AS(kak(R, Matrix<double>{{2, 0}, {0, 1}}), InvariantError);
  CHECK_THROWS_AS(kak(q2, upper({{2, 1}, {0, 1}})), InvariantError);
}

TEST_CASE("iwasawa examples") {
  auto id = iwasawa(R, Matrix<double>::identity(2));
  CHECK(id.a == std::vector<double>{1, 1});
  const PAdicField q3(3);
  const auto n = upper({{1, 5, -2}, {0, 1, Rational(1, 3)}, {0, 0, 1}});
  auto w = iwasawa(q3, n);
  CHECK(w.k == Matrix<Rational>::identity(3));
  CHECK(w.a == std::vector<Rational>{1, 1, 1});
  CHECK(w.n == n);
  auto wr = iwasawa(R, n.cast<double>());
  CHECK(fwtest::max_abs_diff(wr.k, Matrix<double>::identity(3)) < 1e-12);
  CHECK(fwtest::max_abs_diff(wr.n, n.cast<double>()) < 1e-12);
  auto dg = iwasawa(R, Matrix<double>{{3, 0}, {0, 1.0 / 3}});
  CHECK(dg.a[0] == doctest::Approx(3));
  CHECK(dg.a[1] == doctest::Approx(1.0 / 3));
  CHECK(fwtest::max_abs_diff(dg.n, Matrix<double>::identity(2)) < 1e-12);
}

TEST_CASE("real kak against the characteristic-polynomial oracle") {
  auto rng = fwtest::test_rng(301);
  for (int it = 0; it < 2000; ++it) {
    const std::size_t d = 2 + it % 2;
    const Matrix<Rational> gq = it % 4 < 2 ? fwtest::random_unimodularized(rng, d) : fwtest::random_integer_sl(rng, d);
    const auto g = gq.cast<double>();
    const auto c = kak(R, g);
    const auto oracle = fwtest::singular_values_oracle(g);
    for (std::size_t i = 0; i < d; ++i) REQUIRE(std::abs(c.a[i] - oracle[i]) <= 1e-9 * c.a[0]);
    for (std::size_t i = 0; i + 1 < d; ++i) REQUIRE(c.a[i] >= c.a[i + 1]);
    REQUIRE(c.a.back() > 0);
    REQUIRE(fwtest::max_abs_diff(reconstruct(c.k, c.a, c.u), g) <= 1e-9 * c.a[0]);
    REQUIRE(orthogonal(c.k));
    REQUIRE(orthogonal(c.u));
    REQUIRE(c.a[0] == doctest::Approx(operator_norm(R, g)).epsilon(1e-9));
    REQUIRE(operator_norm(R, exterior_square(g)) == doctest::Approx(c.a[0] * c.a[1]).epsilon(1e-9));
    const auto ci = kak(R, inverse(g));
    for (std::size_t i = 0; i < d; ++i) REQUIRE(ci.a[i] == doctest::Approx(1 / c.a[d - 1 - i]).epsilon(1e-8));
  }
}

TEST_CASE("p-adic kak against determinantal divisors") {
  auto rng = fwtest::test_rng(302);
  for (int it = 0; it < 1500; ++it) {
    const std::size_t d = 2 + it % 2;
    const std::uint32_t p = std::array{2u, 3u, 5u}[static_cast<std::size_t>(it) % 3];
    const PAdicField field(p);
    const Matrix<Rational> g = it % 2 ? fwtest::random_unimodularized(rng, d) : fwtest::random_integer_sl(rng, d);
    const auto c = kak(field, g);
    REQUIRE(reconstruct(c.k, c.a, c.u) == g);
    REQUIRE(padic_isometry(c.k, p));
    REQUIRE(padic_isometry(c.u, p));
    const auto divisors = fwtest::determinantal_valuations(g, p);
    long partial = 0;
    for (std::size_t i = 0; i < d; ++i) {
      REQUIRE(c.a[i] == pow_p(p, *valuation(c.a[i], p)));
      partial += *valuation(c.a[i], p);
      REQUIRE(partial == divisors[i]);
      if (i + 1 < d) REQUIRE(field.abs(c.a[i]) >= field.abs(c.a[i + 1]));
    }
    REQUIRE(field.abs(c.a[0]) == operator_norm(field, g));
    REQUIRE(max_abs_entry(field, exterior_square(g)) == field.abs(c.a[0] * c.a[1]));
    const auto ci = kak(field, inverse(g));
    for (std::size_t i = 0; i < d; ++i) REQUIRE(ci.a[i] == 1 / c.a[d - 1 - i]);
    // v and h are the first column of k and first row of u, normalized
    REQUIRE(fubini_study(field, c.v, c.k.column(0)) == 0);
    REQUIRE(fubini_study(field, Vector<Rational>(c.h.entries()), Vector<Rational>(c.u.row(0).entries())) == 0);
  }
}

TEST_CASE("iwasawa reconstructs with unit upper triangular n") {
  auto rng = fwtest::test_rng(303);
  for (int it = 0; it < 1000; ++it) {
    const std::size_t d = 2 + it % 2;
    const auto gq = fwtest::random_unimodularized(rng, d);
    const PAdicField q3(3);
    const auto w = iwasawa(q3, gq);
    REQUIRE(reconstruct(w.k, w.a, w.n) == gq);
    REQUIRE(padic_isometry(w.k, 3));
    for (std::size_t i = 0; i < d; ++i) {
      REQUIRE(w.n(i, i) == 1);
      for (std::size_t j = 0; j < i; ++j) REQUIRE(w.n(i, j) == 0);
      REQUIRE(w.a[i] == pow_p(3, *valuation(w.a[i], 3)));
    }
    const auto g = gq.cast<double>();
    const auto wr = iwasawa(R, g);
    REQUIRE(fwtest::max_abs_diff(reconstruct(wr.k, wr.a, wr.n), g) <= 1e-9 * fwtest::max_abs(g));
    REQUIRE(orthogonal(wr.k));
    for (std::size_t i = 0; i < d; ++i) {
      REQUIRE(wr.a[i] > 0);
      REQUIRE(wr.n(i, i) == 1);
      for (std::size_t j = 0; j < i; ++j) REQUIRE(wr.n(i, j) == 0);
    }
  }
}

TEST_CASE("scaled products") {
  auto id = make_scaled(R, Matrix<double>::identity(2));
  auto same = scaled_multiply(R, id, Matrix<double>::identity(2));
  CHECK(same.scale == 0);
  CHECK(same.unit == Matrix<double>::identity(2));

  auto big = scaled_multiply(R, ScaledMatrix<Reals>::identity(2), Matrix<double>{{100, 0}, {0, 0.01}});
  CHECK(big.scale == doctest::Approx(std::log(100.0)));
  CHECK(big.unit(0, 0) == 1);
  CHECK(big.unit(1, 1) == doctest::Approx(1e-4));

  auto acc = ScaledMatrix<Reals>::identity(2);
  for (int i = 0; i < 50; ++i) acc = scaled_multiply(R, acc, Matrix<double>{{2, 0}, {0, 0.5}});
  CHECK(std::abs(log_norm(R, acc) - 50 * std::log(2.0)) < 1e-8);

  const PAdicField q2(2);
  auto pacc = ScaledMatrix<PAdicField>::identity(2);
  for (int i = 0; i < 50; ++i) pacc = scaled_multiply(q2, pacc, upper({{2, 0}, {0, Rational(1, 2)}}));
  CHECK(pacc.scale == -50);
  CHECK(log_norm(q2, pacc) == doctest::Approx(50 * std::log(2.0)));
  CHECK(reconstruct(q2, pacc) == upper({{pow_p(2, 50), 0}, {0, pow_p(2, -50)}}));

  // tracked ratio far below double resolution
  auto tp = TrackedProduct<Reals>::identity(2);
  const auto f = Factor<Reals>::of(Matrix<double>{{2, 0}, {0, 0.5}});
  for (int i = 0; i < 600; ++i) multiply_right(R, tp, f);
  CHECK(log_ratio(R, tp) == doctest::Approx(-600 * 2 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("kak_kan_ratio examples and boundedness along walks") {
  CHECK(kak_kan_ratio(R, Matrix<double>::identity(3)) == std::vector<double>{1, 1, 1});
  const auto r = kak_kan_ratio(R, Matrix<double>{{5, 0}, {0, 0.2}});
  CHECK(r[0] == doctest::Approx(1));
  CHECK(r[1] == doctest::Approx(1));
  const PAdicField q3(3);
  CHECK(kak_kan_ratio(q3, upper({{Rational(1, 9), 0}, {0, 9}})) == std::vector<Rational>{1, 1});
  CHECK(kak_kan_ratio(q3, upper({{9, 0}, {0, Rational(1, 9)}})) == std::vector<Rational>{81, Rational(1, 81)});

  // a word of length 10 in SL_2(Z), entries still exact in double
  auto rng = fwtest::test_rng(304);
  Matrix<double> w = Matrix<double>::identity(2);
  const Matrix<double> a{{1, 2}, {0, 1}}, b{{1, 0}, {2, 1}};
  for (int i = 0; i < 10; ++i) w = w * (rng.next_u32() & 1 ? a : b);
  for (double x : kak_kan_ratio(R, w)) {
    CHECK(std::isfinite(x));
    CHECK(x > 0);
  }

  // the ratio stays tight along walks: its 90% quantile at n = 200 is no
  // larger than at n = 50, up to one lattice step
  const auto positive = make_measure(R, {Matrix<double>{{2, 1}, {1, 1}}, Matrix<double>{{1, 1}, {1, 2}}},
                                     {Rational(1, 2), Rational(1, 2)});
  const auto mixed = make_measure(q3,
                                  {upper({{3, 0}, {0, Rational(1, 3)}}), upper({{1, 1}, {1, 2}}), upper({{2, 1}, {1, 1}})},
                                  {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  auto quantiles = [](const auto& m, std::size_t reps) {
    std::vector<double> early, late;
    for (std::size_t t = 0; t < reps; ++t) {
      WalkState<std::decay_t<decltype(m.field)>> s(m.dim(), walk_stream(77, static_cast<std::uint32_t>(t)),
                                                    {true, false, false});
      for (std::size_t n = 1; n <= 200; ++n) {
        advance(m, s);
        if (n != 50 && n != 200) continue;
        double worst = 0;
        for (const auto& x : kak_kan_ratio(m.field, s.left)) worst = std::max(worst, std::log(to_double(x)));
        (n == 50 ? early : late).push_back(worst);
      }
    }
    std::sort(early.begin(), early.end());
    std::sort(late.begin(), late.end());
    return std::pair{early[reps * 9 / 10], late[reps * 9 / 10]};
  };
  const auto [re, rl] = quantiles(positive, 400);
  CHECK(rl <= re + std::log(2.0));
  const auto [pe, pl] = quantiles(mixed, 400);
  CHECK(pl <= pe + std::log(81.0));
  MESSAGE("q90 log ratio: real " << re << " -> " << rl << ", Q_3 " << pe << " -> " << pl);
}
