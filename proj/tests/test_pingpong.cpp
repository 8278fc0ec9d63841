#include <doctest.h>

#include <functional>

#include "freewalk/pingpong.hpp"
#include "support.hpp"

using namespace freewalk;

namespace {

const Reals R;

Matrix<double> diag100() { return Matrix<double>{{100, 0}, {0, 0.01}}; }

Matrix<double> conj45(const Matrix<double>& g) {
  const auto r = fwtest::rotation(std::numbers::pi / 4);
  return r * g * r.transpose();
}

Matrix<Rational> q(std::initializer_list<std::initializer_list<Rational>> rows) { return Matrix<Rational>(rows); }

// Independent relation search: depth-first over reduced words, exact products.
std::optional<std::string> brute_force_relation(const std::vector<Matrix<Rational>>& gs, int max_len) {
  std::vector<Matrix<Rational>> letters;
  std::string names;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    letters.push_back(gs[i]);
    names += static_cast<char>('a' + i);
    letters.push_back(inverse(gs[i]));
    names += static_cast<char>('A' + i);
  }
  const auto id = Matrix<Rational>::identity(gs[0].rows());
  for (int len = 1; len <= max_len; ++len) {
    std::optional<std::string> found;
    std::string word;
    std::function<void(const Matrix<Rational>&, int)> go = [&](const Matrix<Rational>& acc, int left) {
      if (found) return;
      if (left == 0) {
        if (acc == id) found = word;
        return;
      }
      for (std::size_t k = 0; k < letters.size(); ++k) {
        // letters 2i and 2i+1 are mutually inverse
        if (!word.empty() && names.find(word.back()) == (k ^ 1)) continue;
        word.push_back(names[k]);
        go(acc * letters[k], left - 1);
        word.pop_back();
        if (found) return;
      }
    };
    go(id, len);
    if (found) return found;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("contraction_data examples") {
  auto d = contraction_data(R, diag100());
  CHECK(d.ratio == doctest::Approx(1e-4));
  CHECK(d.separation == doctest::Approx(1));
  CHECK(fubini_study(R, d.v, Vector<double>{1, 0}) < 1e-12);
  CHECK(std::abs(d.h[1]) < 1e-12);

  auto rot = contraction_data(R, Matrix<double>{{0, -1}, {1, 0}});
  CHECK(rot.ratio == doctest::Approx(1));

  auto up = contraction_data(R, Matrix<double>{{1, 2}, {0, 1}});
  CHECK(up.ratio == doctest::Approx((std::sqrt(2.0) - 1) / (std::sqrt(2.0) + 1)).epsilon(1e-12));
  CHECK(up.ratio == doctest::Approx(0.171572875254).epsilon(1e-9));

  const PAdicField q2(2);
  auto pd = contraction_data(q2, q({{Rational(1, 4), 0}, {0, 4}}));
  CHECK(pd.ratio == Rational(1, 16));
  CHECK(pd.separation == 1);
}

TEST_CASE("is_eps_contracting and is_very_proximal examples") {
  CHECK(is_eps_contracting(R, diag100(), 0.02).contracting);
  CHECK_FALSE(is_eps_contracting(R, Matrix<double>::identity(2), 0.9).contracting);
  CHECK_FALSE(is_eps_contracting(R, diag100(), 0.005).contracting);
  CHECK_THROWS_AS(is_eps_contracting(R, diag100(), 0.0), DomainError);
  CHECK_THROWS_AS(is_eps_contracting(R, diag100(), 1.0), DomainError);

  CHECK(is_very_proximal(R, diag100(), 0.5, 0.02));
  CHECK_FALSE(is_very_proximal(R, Matrix<double>::identity(2), 0.5, 0.02));
  CHECK(is_very_proximal(R, conj45(diag100()), 0.5, 0.02));
  CHECK_THROWS_AS(is_very_proximal(R, diag100(), 0.04, 0.02), DomainError);
}

TEST_CASE("is_pingpong_tuple examples") {
  auto rep = is_pingpong_tuple(R, {diag100(), conj45(diag100())}, 0.5, 0.02);
  CHECK(rep.certified);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 2; j < 4; ++j) {
      CHECK(rep.cross(i, j) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
      CHECK(rep.cross(j, i) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
    }

  auto dup = is_pingpong_tuple(R, {diag100(), diag100()}, 0.5, 0.02);
  CHECK_FALSE(dup.certified);
  CHECK(dup.cross_margin_failed);
  CHECK(dup.cross(1, 2) == doctest::Approx(0).epsilon(1e-12));

  auto ids = is_pingpong_tuple(R, {Matrix<double>::identity(2), Matrix<double>::identity(2)}, 0.5, 0.02);
  CHECK_FALSE(ids.certified);
  CHECK(ids.own_contraction_failed);
  CHECK_THROWS_AS(is_pingpong_tuple(R, {diag100()}, 0.5, 0.02), UsageError);
  CHECK_THROWS_AS(is_pingpong_tuple(R, {diag100(), diag100()}, 0.03, 0.02), DomainError);

  const PAdicField q3(3);
  const std::vector<Matrix<Rational>> qp{q({{9, 0}, {0, Rational(1, 9)}}),
                                         q({{Rational(161, 9), Rational(-80, 9)}, {Rational(160, 9), Rational(-79, 9)}})};
  CHECK(is_pingpong_tuple(q3, qp, 0.5, 0.2).certified);
  CHECK_FALSE(is_pingpong_tuple(q3, {qp[0], qp[0]}, 0.5, 0.2).certified);
}

TEST_CASE("word oracle examples") {
  const std::vector<Matrix<Rational>> sanov{q({{1, 2}, {0, 1}}), q({{1, 0}, {2, 1}})};
  CHECK_FALSE(free_word_oracle(sanov, 12).relation_found);

  const std::vector<Matrix<Rational>> unipotent{q({{1, 1}, {0, 1}}), q({{1, 0}, {1, 1}})};
  const auto v = free_word_oracle(unipotent, 12);
  CHECK(v.relation_found);
  CHECK(evaluate_word(unipotent, v.word) == Matrix<Rational>::identity(2));
  CHECK(evaluate_word(unipotent, "aBaaBaaBaaBa") == Matrix<Rational>::identity(2));
  CHECK(evaluate_word(unipotent, "aBa") == q({{0, 1}, {-1, 0}}));
  const auto rels = find_relations(unipotent, 12);
  CHECK(std::find(rels.begin(), rels.end(), "aBaaBaaBaaBa") != rels.end());
  for (const auto& w : rels) {
    CHECK(is_reduced(w));
    CHECK(evaluate_word(unipotent, w) == Matrix<Rational>::identity(2));
  }

  const auto single = free_word_oracle({Matrix<Rational>::identity(2)}, 1);
  CHECK(single.relation_found);
  CHECK(single.word == "a");
  CHECK_THROWS_AS(free_word_oracle(sanov, 17), UsageError);
  CHECK(is_reduced("abAB"));
  CHECK_FALSE(is_reduced("abBa"));
}

TEST_CASE("word oracle agrees with brute-force enumeration") {
  auto rng = fwtest::test_rng(401);
  std::vector<std::vector<Matrix<Rational>>> cases{
      {q({{1, 1}, {0, 1}}), q({{1, 0}, {1, 1}})},
      {q({{0, -1}, {1, 0}}), q({{1, 1}, {0, 1}})},   // order 4 and a parabolic
      {q({{0, -1}, {1, 1}}), q({{2, 0}, {0, Rational(1, 2)}})},  // order 6
      {q({{1, 2}, {0, 1}}), q({{1, 0}, {2, 1}})},
      {q({{1, 3}, {0, 1}}), q({{1, 0}, {3, 1}})},
  };
  for (int i = 0; i < 12; ++i) cases.push_back({fwtest::random_integer_sl(rng, 2, 4, 4), fwtest::random_integer_sl(rng, 2, 4, 4)});
  for (const auto& gs : cases) {
    const auto lib = free_word_oracle(gs, 6);
    const auto brute = brute_force_relation(gs, 6);
    REQUIRE(lib.relation_found == brute.has_value());
    if (brute) {
      REQUIRE(lib.word.size() == brute->size());
      REQUIRE(evaluate_word(gs, lib.word) == Matrix<Rational>::identity(2));
    }
  }
}

TEST_CASE("contraction mapping property") {
  auto rng = fwtest::test_rng(402);
  const PAdicField q3(3);
  for (double eps : {0.3, 0.1, 0.02}) {
    for (int it = 0; it < 40; ++it) {
      // real: k diag(s, 1/s) u with s^{-2} <= eps^2
      const double s = (1 + 3 * rng.uniform()) / eps;
      const auto g = fwtest::rotation(7 * rng.uniform()) * Matrix<double>{{s, 0}, {0, 1 / s}} *
                     fwtest::rotation(7 * rng.uniform());
      const auto verdict = is_eps_contracting(R, g, eps);
      REQUIRE(verdict.contracting);
      const auto& dat = verdict.data;
      for (int j = 0; j < 200; ++j) {
        const Vector<double> x{rng.normal(), rng.normal()};
        const double dh = dist_point_hyperplane(R, x, dat.h);
        if (!(dh > eps)) continue;
        const double img = fubini_study(R, g * x, dat.v);
        REQUIRE(img <= dat.ratio / dh + 1e-9);
        REQUIRE(img < eps);
      }

      // p-adic: GL_2(Z_3) conjugates of diag(3^m, 3^-m)
      const long m = static_cast<long>(std::ceil(-std::log(eps) / std::log(3.0))) + fwtest::uniform_int(rng, 0, 1);
      const auto k1 = fwtest::random_integer_sl(rng, 2), k2 = fwtest::random_integer_sl(rng, 2);
      const auto gp = Matrix<Rational>(k1 * q({{pow_p(3, -m), 0}, {0, pow_p(3, m)}}) * k2);
      const auto pv = is_eps_contracting(q3, gp, eps);
      REQUIRE(pv.contracting);
      for (int j = 0; j < 200; ++j) {
        Vector<Rational> x{fwtest::uniform_int(rng, -50, 50), fwtest::uniform_int(rng, -50, 50)};
        if (x.is_zero()) continue;
        const Rational dh = dist_point_hyperplane(q3, x, pv.data.h);
        if (!(dh > q3.threshold(eps))) continue;
        const Rational img = fubini_study(q3, Vector<Rational>(gp * x), pv.data.v);
        REQUIRE(img <= pv.data.ratio / dh);
        REQUIRE(img < q3.threshold(eps));
      }
    }
  }
}

TEST_CASE("isometry equivariance and eps monotonicity") {
  auto rng = fwtest::test_rng(403);
  const PAdicField q5(5);
  for (int it = 0; it < 500; ++it) {
    const auto gq = fwtest::random_unimodularized(rng, 2);
    const auto g = gq.cast<double>();
    const auto k1 = fwtest::rotation(7 * rng.uniform()), k2 = fwtest::rotation(7 * rng.uniform());
    const double base = contraction_data(R, g).ratio;
    REQUIRE(contraction_data(R, Matrix<double>(k1 * g * k2)).ratio == doctest::Approx(base).epsilon(1e-9));
    const auto i1 = fwtest::random_integer_sl(rng, 2), i2 = fwtest::random_integer_sl(rng, 2);
    REQUIRE(contraction_data(q5, Matrix<Rational>(i1 * gq * i2)).ratio == contraction_data(q5, gq).ratio);

    bool seen = false;
    for (double eps = 0.01; eps < 1; eps += 0.01) {
      const bool now = is_eps_contracting(R, g, eps).contracting;
      REQUIRE((!seen || now));
      seen = seen || now;
    }
  }
}

TEST_CASE("certified real mode agrees with floating point on clear cases") {
  const std::vector<Matrix<Rational>> pair{
      q({{100, 0}, {0, Rational(1, 100)}}),
      q({{Rational(10001, 200), Rational(9999, 200)}, {Rational(9999, 200), Rational(10001, 200)}})};
  const auto cert = certify_pingpong_real(pair, 0.5, 0.02);
  CHECK(cert.certified);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 2; j < 4; ++j) {
      CHECK(cert.cross_lower(i, j) <= 1 / std::sqrt(2.0));
      CHECK(cert.cross_lower(i, j) > 0.5);
    }
  const auto c = certify_contraction(pair[0], 0.02);
  CHECK(c.ratio_ok);
  CHECK(c.ratio_upper >= 1e-4);
  CHECK(c.ratio_upper < 1.0001e-4);

  CHECK_FALSE(certify_pingpong_real({Matrix<Rational>::identity(2), Matrix<Rational>::identity(2)}, 0.5, 0.02).certified);
  CHECK_FALSE(certify_pingpong_real({pair[0], pair[0]}, 0.5, 0.02).certified);
  // exact certification implies the floating-point verdict
  CHECK(is_pingpong_tuple(R, {pair[0].cast<double>(), pair[1].cast<double>()}, 0.5, 0.02).certified);
  CHECK_THROWS_AS(certify_pingpong_real(pair, 0.03, 0.02), DomainError);
}
