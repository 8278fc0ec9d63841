#pragma once

// Norms and projective distances over a field policy (RealField<T> or
// PAdicField).  Real norms are Euclidean, p-adic norms are max norms.

#include <algorithm>
#include <cmath>

#include "freewalk/matrix.hpp"
#include "freewalk/real_linalg.hpp"
#include "freewalk/scalar.hpp"

namespace freewalk {

namespace detail {

template <class F, class Range>
typename F::abs_type coords_norm(const F& field, const Range& xs) {
  using A = typename F::abs_type;
  if constexpr (F::exact) {
    A m(0);
    for (const auto& x : xs) m = std::max(m, field.abs(x));
    return m;
  } else {
    using std::sqrt;
    // scale first so long products near overflow still have a finite norm
    A m(0);
    for (const auto& x : xs) m = std::max(m, field.abs(x));
    if (m == 0) return m;
    A s(0);
    for (const auto& x : xs) {
      A y = x / m;
      s += y * y;
    }
    return m * sqrt(s);
  }
}

}  // namespace detail

template <LocalField F, class Tag>
typename F::abs_type norm(const F& field, const Coords<typename F::value_type, Tag>& x) {
  return detail::coords_norm(field, x);
}

template <LocalField F>
typename F::abs_type vector_norm(const F& field, const Vector<typename F::value_type>& x) {
  return detail::coords_norm(field, x);
}

template <LocalField F>
typename F::abs_type covector_norm(const F& field, const Covector<typename F::value_type>& f) {
  return detail::coords_norm(field, f);
}

/// Largest entry in absolute value.
template <LocalField F>
typename F::abs_type max_abs_entry(const F& field, const Matrix<typename F::value_type>& g) {
  typename F::abs_type m(0);
  for (const auto& x : g.data()) m = std::max(m, field.abs(x));
  return m;
}

/// Operator norm for the canonical norm: largest singular value over R,
/// largest entry absolute value over Q_p.
template <LocalField F>
typename F::abs_type operator_norm(const F& field, const Matrix<typename F::value_type>& g) {
  if constexpr (F::exact) {
    return max_abs_entry(field, g);
  } else {
    return largest_singular_value(g);
  }
}

/// g.f = f o g^{-1}.
template <class T>
Covector<T> dual_action(const Matrix<T>& g, const Covector<T>& f) {
  return f * inverse(g);
}

/// delta([x],[y]) = ||x ^ y|| / (||x|| ||y||).
template <LocalField F>
typename F::abs_type fubini_study(const F& field, const Vector<typename F::value_type>& x,
                                  const Vector<typename F::value_type>& y) {
  if (x.size() != y.size()) throw UsageError("fubini_study: dimension mismatch");
  auto nx = vector_norm(field, x);
  auto ny = vector_norm(field, y);
  if (nx == 0 || ny == 0) throw DomainError("fubini_study: zero vector");
  if constexpr (F::exact) {
    return vector_norm(field, wedge(x, y)) / (nx * ny);
  } else {
    // normalizing first keeps the wedge coordinates of order one
    Vector<typename F::value_type> xs = x, ys = y;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xs[i] /= nx;
      ys[i] /= ny;
    }
    auto d = vector_norm(field, wedge(xs, ys));
    return d > 1 ? typename F::abs_type(1) : d;
  }
}

/// delta([x], Ker f) = |f(x)| / (||f|| ||x||).
template <LocalField F>
typename F::abs_type dist_point_hyperplane(const F& field, const Vector<typename F::value_type>& x,
                                           const Covector<typename F::value_type>& f) {
  if (x.size() != f.size()) throw UsageError("dist_point_hyperplane: dimension mismatch");
  auto nx = vector_norm(field, x);
  auto nf = covector_norm(field, f);
  if (nx == 0 || nf == 0) throw DomainError("dist_point_hyperplane: zero input");
  if constexpr (F::exact) {
    return field.abs(evaluate(f, x)) / (nf * nx);
  } else {
    typename F::value_type s(0);
    for (std::size_t i = 0; i < x.size(); ++i) s += (f[i] / nf) * (x[i] / nx);
    auto d = field.abs(s);
    return d > 1 ? typename F::abs_type(1) : d;
  }
}

/// Deterministic representative of a projective class.  Over R: unit norm,
/// first nonzero coordinate positive.  Over Q_p: divided by the first
/// coordinate of minimal valuation, so that coordinate is 1 and all others
/// lie in the valuation ring.
template <LocalField F, class Tag>
Coords<typename F::value_type, Tag> normalize_representative(const F& field,
                                                             Coords<typename F::value_type, Tag> x) {
  using T = typename F::value_type;
  if (x.is_zero()) throw DomainError("normalize_representative: zero vector");
  if constexpr (F::exact) {
    std::size_t best = x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      if (best == x.size() || field.abs(x[i]) > field.abs(x[best])) best = i;
    }
    T pivot = x[best];
    for (std::size_t i = 0; i < x.size(); ++i) x[i] /= pivot;
  } else {
    auto n = norm(field, x);
    std::size_t first = 0;
    while (x[first] == 0) ++first;
    T s = x[first] < 0 ? T(-n) : T(n);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] /= s;
  }
  return x;
}

}  // namespace freewalk
