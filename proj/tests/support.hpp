#pragma once

// Shared helpers for the test suites: seeded random inputs and independent
// oracles that do not go through the library's decompositions.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "freewalk/matrix.hpp"
#include "freewalk/rng.hpp"
#include "freewalk/scalar.hpp"

namespace fwtest {

using freewalk::Integer;
using freewalk::Matrix;
using freewalk::Rational;
using freewalk::RngStream;

inline RngStream test_rng(std::uint64_t seed, std::uint32_t index = 0) {
  return RngStream(seed, freewalk::stream_id(freewalk::StreamPurpose::test, 0, index));
}

inline long uniform_int(RngStream& rng, long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(rng.next_u64() % span);
}

/// Integer matrix with entries in [lo, hi] and nonzero determinant, then the
/// first column divided by the determinant: a rational matrix in SL_d.
inline Matrix<Rational> random_unimodularized(RngStream& rng, std::size_t d, long lo = -20, long hi = 20) {
  for (;;) {
    Matrix<Rational> m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = uniform_int(rng, lo, hi);
    const Rational det = freewalk::determinant(m);
    if (det == 0) continue;
    for (std::size_t i = 0; i < d; ++i) m(i, 0) /= det;
    return m;
  }
}

/// Integer matrix in SL_d with entries in [-bound, bound], built from random
/// elementary row operations and signed permutations.
inline Matrix<Rational> random_integer_sl(RngStream& rng, std::size_t d, long bound = 20, int ops = 12) {
  Matrix<Rational> m = Matrix<Rational>::identity(d);
  for (int k = 0; k < ops; ++k) {
    const std::size_t i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(d) - 1));
    std::size_t j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(d) - 2));
    if (j >= i) ++j;
    const long c = uniform_int(rng, -3, 3);
    Matrix<Rational> next = m;
    for (std::size_t col = 0; col < d; ++col) next(i, col) += c * m(j, col);
    bool ok = true;
    for (const auto& x : next.data()) ok = ok && abs(x) <= bound;
    if (ok) m = next;
  }
  return m;
}

/// Eigenvalues of a symmetric 2x2 or 3x3 real matrix, descending, from the
/// characteristic polynomial (closed form / trigonometric Cardano).
inline std::vector<double> symmetric_eigenvalues(const Matrix<double>& s) {
  const std::size_t d = s.rows();
  std::vector<double> ev;
  if (d == 2) {
    const double tr = s(0, 0) + s(1, 1);
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    ev = {tr / 2 + disc, tr / 2 - disc};
  } else {
    const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
    const double q = (s(0, 0) + s(1, 1) + s(2, 2)) / 3;
    const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) + (s(2, 2) - q) * (s(2, 2) - q) +
                      2 * p1;
    const double p = std::sqrt(p2 / 6);
    if (p == 0) return {q, q, q};
    Matrix<double> b = s;
    for (std::size_t i = 0; i < 3; ++i) b(i, i) -= q;
    b *= 1 / p;
    const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(detb / 2, -1.0, 1.0);
    const double phi = std::acos(r) / 3;
    const double e1 = q + 2 * p * std::cos(phi);
    const double e3 = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
    ev = {e1, 3 * q - e1 - e3, e3};
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

/// Singular values of a real 2x2 / 3x3 matrix via eigenvalues of g^T g.
inline std::vector<double> singular_values_oracle(const Matrix<double>& g) {
  auto ev = symmetric_eigenvalues(g.transpose() * g);
  for (double& e : ev) e = std::sqrt(std::max(0.0, e));
  return ev;
}

/// Minimal p-adic valuation over all i x i minors of g, i = 1..d.  For the
/// Smith form these are v(a_1) + ... + v(a_i) (determinantal divisors).
inline std::vector<long> determinantal_valuations(const Matrix<Rational>& g, std::uint32_t p) {
  const std::size_t d = g.rows();
  std::vector<long> out;
  for (std::size_t k = 1; k <= d; ++k) {
    std::vector<std::size_t> rows(k), cols(k);
    std::optional<long> best;
    // enumerate k-subsets with bitmasks (d <= 4)
    for (unsigned rm = 0; rm < (1u << d); ++rm) {
      if (static_cast<std::size_t>(__builtin_popcount(rm)) != k) continue;
      for (unsigned cm = 0; cm < (1u << d); ++cm) {
        if (static_cast<std::size_t>(__builtin_popcount(cm)) != k) continue;
        Matrix<Rational> sub(k, k);
        std::size_t a = 0;
        for (std::size_t i = 0; i < d; ++i) {
          if (!(rm >> i & 1)) continue;
          std::size_t b = 0;
          for (std::size_t j = 0; j < d; ++j) {
            if (!(cm >> j & 1)) continue;
            sub(a, b++) = g(i, j);
          }
          ++a;
        }
        auto v = freewalk::valuation(freewalk::determinant(sub), p);
        if (v && (!best || *v < *best)) best = v;
      }
    }
    out.push_back(*best);
  }
  return out;
}

template <class T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(freewalk::to_double(a(i, j) - b(i, j))));
  return m;
}

template <class T>
double max_abs(const Matrix<T>& a) {
  double m = 0;
  for (const auto& x : a.data()) m = std::max(m, std::abs(freewalk::to_double(x)));
  return m;
}

inline Matrix<double> rotation(double theta) {
  return Matrix<double>{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}};
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace fwtest
