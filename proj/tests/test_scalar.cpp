#include <doctest.h>

#include "freewalk/interval.hpp"
#include "freewalk/scalar.hpp"
#include "support.hpp"

using namespace freewalk;

TEST_CASE("abs_value examples") {
  CHECK(abs_value(Scalar(Rational(0)), FieldSpec::padic(5)) == 0.0);
  CHECK(abs_value(Scalar(0.0), FieldSpec::real()) == 0.0);
  CHECK(abs_value(Scalar(Rational(12)), FieldSpec::padic(2)) == 0.25);
  CHECK(abs_value(Scalar(Rational(5, 3)), FieldSpec::padic(3)) == 3.0);
  CHECK(abs_value(Scalar(-2.5), FieldSpec::real()) == 2.5);
  CHECK(padic_abs(Rational(12), 2) == Rational(1, 4));
  CHECK_THROWS_AS(abs_value(Scalar(1.5), FieldSpec::padic(3)), UsageError);
}

TEST_CASE("valuation examples") {
  CHECK(valuation(Rational(8), 2) == 3);
  CHECK(valuation(Rational(1), 7) == 0);
  CHECK(valuation(Rational(9, 2), 3) == 2);
  CHECK(valuation(Rational(9, 2), 2) == -1);
  CHECK_FALSE(valuation(Rational(0), 5).has_value());
  CHECK_THROWS_AS(valuation(Scalar(2.0), 2), UsageError);
  CHECK_THROWS_AS(valuation(Scalar(Rational(4)), 4), DomainError);
  CHECK_THROWS_AS(FieldSpec::padic(6), DomainError);
  CHECK_THROWS_AS(FieldSpec::padic(1), DomainError);
}

TEST_CASE("rational parsing and formatting") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational("1.25e-2") == Rational(1, 80));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
  CHECK(format_rational(Rational(4, 2)) == "2/1");
  CHECK(format_rational(Rational(-3, 9)) == "-1/3");
  CHECK_THROWS_AS(parse_rational("1/0"), UsageError);
  CHECK_THROWS_AS(parse_rational("abc"), UsageError);
  CHECK_THROWS_AS(parse_rational(""), UsageError);
  CHECK(format_fixed(0.1 + 0.2) == "0.3");
  CHECK(std::stod(format_real(0.1)) == 0.1);
}

TEST_CASE("valuations are additive and ultrametric") {
  auto rng = fwtest::test_rng(101);
  for (int it = 0; it < 10000; ++it) {
    auto draw = [&] {
      Rational q(fwtest::uniform_int(rng, -2000, 2000), fwtest::uniform_int(rng, 1, 2000));
      q.canonicalize();
      return q;
    };
    const Rational x = draw(), y = draw();
    for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
      auto vx = valuation(x, p), vy = valuation(y, p);
      auto vxy = valuation(Rational(x * y), p);
      if (vx && vy) {
        REQUIRE(vxy == *vx + *vy);
      } else {
        REQUIRE_FALSE(vxy.has_value());
      }
      auto vs = valuation(Rational(x + y), p);
      if (vx && vy) {
        if (vs) REQUIRE(*vs >= std::min(*vx, *vy));
        if (*vx != *vy) REQUIRE(vs == std::min(*vx, *vy));
      }
      REQUIRE(padic_abs(x + y, p) <= std::max(padic_abs(x, p), padic_abs(y, p)));
      REQUIRE(padic_abs(x * y, p) == padic_abs(x, p) * padic_abs(y, p));
    }
  }
}

namespace {

bool encloses(const Interval& iv, const Rational& exact) {
  return Rational(iv.lo()) <= exact && exact <= Rational(iv.hi());
}

}  // namespace

TEST_CASE("interval arithmetic encloses the exact result") {
  auto rng = fwtest::test_rng(102);
  for (int it = 0; it < 1000; ++it) {
    const double a = (rng.uniform() - 0.5) * std::pow(10.0, fwtest::uniform_int(rng, -8, 8));
    const double b = (rng.uniform() - 0.5) * std::pow(10.0, fwtest::uniform_int(rng, -8, 8));
    const Rational qa(a), qb(b);
    const Interval ia(a), ib(b);
    REQUIRE(encloses(ia + ib, qa + qb));
    REQUIRE(encloses(ia - ib, qa - qb));
    REQUIRE(encloses(ia * ib, qa * qb));
    REQUIRE(encloses(square(ia), qa * qa));
    if (b != 0) REQUIRE(encloses(ia / ib, qa / qb));
    const Interval s = sqrt(abs(ia));
    REQUIRE(Rational(s.lo()) * Rational(s.lo()) <= abs(qa));
    REQUIRE(abs(qa) <= Rational(s.hi()) * Rational(s.hi()));

    // wide operands: results must enclose the image of every point
    const Interval wa(std::min(a, b), std::max(a, b));
    const double t = rng.uniform();
    const Rational inside = Rational(wa.lo()) + Rational(t) * (Rational(wa.hi()) - Rational(wa.lo()));
    REQUIRE(encloses(wa * ib, inside * qb));
    REQUIRE(encloses(wa + wa, inside + qa));
  }
  const Rational third(1, 3);
  const Interval e = Interval::enclose(third);
  CHECK(encloses(e, third));
  CHECK(e.width() > 0);
  CHECK(Interval::enclose(Rational(1, 4)).width() == 0);
  CHECK_THROWS_AS(Interval(1.0) / Interval(-1.0, 1.0), DomainError);
}

TEST_CASE("field policies") {
  const PAdicField q3(3);
  CHECK(q3.abs(Rational(9)) == Rational(1, 9));
  CHECK(q3.val(Rational(1, 27)) == -3);
  CHECK(q3.log_abs(Rational(1, 9)) == doctest::Approx(-2 * std::log(3.0)));
  CHECK_THROWS_AS(q3.val(Rational(0)), DomainError);
  const Reals re;
  CHECK(re.abs(-3.0) == 3.0);
  CHECK(re.from_rational(Rational(1, 4)) == 0.25);
  CHECK(FieldSpec::padic(5).to_string() != FieldSpec::real().to_string());
}
