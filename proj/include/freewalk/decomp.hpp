#pragma once

// Cartan (KAK) and Iwasawa (KAN) decompositions in SL_d, plus products kept
// as (unit matrix, separated scale) so that long walks never overflow.

#include <cmath>
#include <vector>

#include "freewalk/matrix.hpp"
#include "freewalk/projlin.hpp"
#include "freewalk/real_linalg.hpp"
#include "freewalk/scalar.hpp"

namespace freewalk {

/// g = k * diag(a) * u.  |a_1| >= ... >= |a_d|; k and u are isometries of
/// the canonical norm.  v = k e_1 is the attracting point and h = e_1^* u is
/// the covector cutting out the repelling hyperplane H = Ker h.  Both are
/// stored as normalized representatives.
template <LocalField F>
struct Kak {
  using T = typename F::value_type;
  Matrix<T> k;
  std::vector<T> a;
  Matrix<T> u;
  Vector<T> v;
  Covector<T> h;
};

/// g = k * diag(a) * n with n upper unitriangular.
template <LocalField F>
struct Iwasawa {
  using T = typename F::value_type;
  Matrix<T> k;
  std::vector<T> a;
  Matrix<T> n;
};

// Valuation-ring routines, defined in decomp_padic.cpp.  They accept any
// invertible matrix; the unimodularity check lives in kak()/iwasawa().
Kak<PAdicField> kak_padic(const PAdicField& field, const Matrix<Rational>& g);
Iwasawa<PAdicField> iwasawa_padic(const PAdicField& field, const Matrix<Rational>& g);

/// InvariantError unless det g = 1 (exactly over Q_p; over R to
/// max(1e-9, 1e-13 * prod ||row_i||)).
template <LocalField F>
void require_unimodular(const F& field, const Matrix<typename F::value_type>& g) {
  (void)field;
  if (!g.is_square() || g.rows() < 2) throw UsageError("expected a square matrix with d >= 2");
  auto det = determinant(g);
  if constexpr (F::exact) {
    if (det != 1) throw InvariantError("matrix is not in SL_d: det = " + format_rational(det));
  } else {
    using std::abs;
    using std::sqrt;
    // rounding in det grows with the Hadamard bound prod ||row_i||
    typename F::value_type hadamard(1);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      typename F::value_type row(0);
      for (std::size_t j = 0; j < g.cols(); ++j) row += g(i, j) * g(i, j);
      hadamard *= sqrt(row);
    }
    const double tol = std::max(1e-9, 1e-13 * to_double(hadamard));
    if (!(abs(det - 1) <= tol)) {
      throw InvariantError("matrix is not in SL_d: det = " + format_real(to_double(det)));
    }
  }
}

/// KAK of any invertible matrix (scaled products are not unimodular).
template <LocalField F>
Kak<F> kak_general(const F& field, const Matrix<typename F::value_type>& g) {
  if constexpr (F::exact) {
    return kak_padic(field, g);
  } else {
    auto svd = svd_sorted(g);
    Kak<F> out;
    out.k = std::move(svd.u);
    out.a = std::move(svd.sigma);
    out.u = std::move(svd.vt);
    out.v = normalize_representative(field, out.k.column(0));
    out.h = normalize_representative(field, out.u.row(0));
    return out;
  }
}

template <LocalField F>
Kak<F> kak(const F& field, const Matrix<typename F::value_type>& g) {
  require_unimodular(field, g);
  return kak_general(field, g);
}

template <LocalField F>
Iwasawa<F> iwasawa_general(const F& field, const Matrix<typename F::value_type>& g) {
  using T = typename F::value_type;
  if constexpr (F::exact) {
    return iwasawa_padic(field, g);
  } else {
    auto qr = qr_positive(g);
    const std::size_t d = g.rows();
    Iwasawa<F> out;
    out.k = std::move(qr.q);
    out.a.resize(d);
    out.n = qr.r;
    for (std::size_t i = 0; i < d; ++i) {
      out.a[i] = qr.r(i, i);
      for (std::size_t j = 0; j < d; ++j) out.n(i, j) = j == i ? T(1) : qr.r(i, j) / out.a[i];
    }
    return out;
  }
}

template <LocalField F>
Iwasawa<F> iwasawa(const F& field, const Matrix<typename F::value_type>& g) {
  require_unimodular(field, g);
  return iwasawa_general(field, g);
}

template <class T>
Matrix<T> reconstruct(const Matrix<T>& k, const std::vector<T>& a, const Matrix<T>& u) {
  Matrix<T> ka = k;
  for (std::size_t i = 0; i < ka.rows(); ++i)
    for (std::size_t j = 0; j < ka.cols(); ++j) ka(i, j) *= a[j];
  return ka * u;
}

/// (|a_i(g)| / |a~_i(g)|)_i from the KAK and KAN decompositions of g.
template <LocalField F>
std::vector<typename F::abs_type> kak_kan_ratio(const F& field, const Matrix<typename F::value_type>& g) {
  require_unimodular(field, g);
  auto c = kak_general(field, g);
  auto w = iwasawa_general(field, g);
  std::vector<typename F::abs_type> out;
  for (std::size_t i = 0; i < c.a.size(); ++i) out.push_back(field.abs(c.a[i]) / field.abs(w.a[i]));
  return out;
}

// ---------------------------------------------------------------------------
// Scaled products.

/// Represents exp(scale) * unit over R (unit has max-abs entry 1) and
/// p^scale * unit over Q_p (unit has minimal entry valuation 0).
template <LocalField F>
struct ScaledMatrix {
  using T = typename F::value_type;
  Matrix<T> unit;
  typename F::scale_type scale{};

  static ScaledMatrix identity(std::size_t d) { return {Matrix<T>::identity(d), {}}; }
};

template <LocalField F>
void renormalize(const F& field, ScaledMatrix<F>& m) {
  using T = typename F::value_type;
  if constexpr (F::exact) {
    long lowest = 0;
    bool any = false;
    for (const auto& x : m.unit.data()) {
      if (x == 0) continue;
      long v = field.val(x);
      if (!any || v < lowest) lowest = v;
      any = true;
    }
    if (!any) throw DomainError("scaled product collapsed to zero");
    if (lowest != 0) {
      m.unit *= pow_p(field.prime, -lowest);
      m.scale += lowest;
    }
  } else {
    using std::log;
    auto top = max_abs_entry(field, m.unit);
    if (top == 0) throw DomainError("scaled product collapsed to zero");
    m.unit *= T(1) / top;
    m.scale += log(top);
  }
}

template <LocalField F>
ScaledMatrix<F> make_scaled(const F& field, Matrix<typename F::value_type> g) {
  ScaledMatrix<F> m{std::move(g), {}};
  renormalize(field, m);
  return m;
}

/// acc * g.
template <LocalField F>
ScaledMatrix<F> scaled_multiply(const F& field, const ScaledMatrix<F>& acc, const Matrix<typename F::value_type>& g) {
  ScaledMatrix<F> out{acc.unit * g, acc.scale};
  renormalize(field, out);
  return out;
}

/// g * acc.
template <LocalField F>
ScaledMatrix<F> scaled_premultiply(const F& field, const Matrix<typename F::value_type>& g, const ScaledMatrix<F>& acc) {
  ScaledMatrix<F> out{g * acc.unit, acc.scale};
  renormalize(field, out);
  return out;
}

/// Natural log of the scale factor's absolute value.
template <LocalField F>
double log_scale(const F& field, const ScaledMatrix<F>& m) {
  if constexpr (F::exact) {
    return -static_cast<double>(m.scale) * std::log(static_cast<double>(field.prime));
  } else {
    return to_double(m.scale);
  }
}

/// log ||product|| = log|scale| + log ||unit||.
template <LocalField F>
double log_norm(const F& field, const ScaledMatrix<F>& m) {
  return log_scale(field, m) + field.log_abs(operator_norm(field, m.unit));
}

/// The represented product (may overflow doubles for long walks).
template <LocalField F>
Matrix<typename F::value_type> reconstruct(const F& field, const ScaledMatrix<F>& m) {
  using T = typename F::value_type;
  Matrix<T> g = m.unit;
  if constexpr (F::exact) {
    g *= pow_p(field.prime, m.scale);
  } else {
    using std::exp;
    g *= T(exp(m.scale));
  }
  return g;
}

/// A product together with its exterior square, both scaled.  The wedge
/// tracker gives log |a_1 a_2| accurately even when a_2/a_1 is far below
/// machine precision.
template <LocalField F>
struct TrackedProduct {
  using T = typename F::value_type;
  ScaledMatrix<F> mat;
  ScaledMatrix<F> wedge;

  static TrackedProduct identity(std::size_t d) {
    return {ScaledMatrix<F>::identity(d), ScaledMatrix<F>::identity(d * (d - 1) / 2)};
  }
};

/// A factor with its exterior square precomputed.
template <LocalField F>
struct Factor {
  using T = typename F::value_type;
  Matrix<T> g;
  Matrix<T> wedge;

  static Factor of(Matrix<T> m) {
    Matrix<T> w = exterior_square(m);
    return {std::move(m), std::move(w)};
  }
};

template <LocalField F>
void multiply_right(const F& field, TrackedProduct<F>& p, const Factor<F>& x) {
  p.mat = scaled_multiply(field, p.mat, x.g);
  p.wedge = scaled_multiply(field, p.wedge, x.wedge);
}

template <LocalField F>
void multiply_left(const F& field, TrackedProduct<F>& p, const Factor<F>& x) {
  p.mat = scaled_premultiply(field, x.g, p.mat);
  p.wedge = scaled_premultiply(field, x.wedge, p.wedge);
}

/// |a_2| / |a_1| of the tracked product.  Exact over Q_p, where it equals
/// ||wedge^2 unit|| because the unit has norm 1.
template <LocalField F>
typename F::abs_type ratio(const F& field, const TrackedProduct<F>& p) {
  using A = typename F::abs_type;
  if constexpr (F::exact) {
    return max_abs_entry(field, exterior_square(p.mat.unit)) / max_abs_entry(field, p.mat.unit);
  } else {
    using std::exp;
    using std::log;
    A lw = p.wedge.scale + log(operator_norm(field, p.wedge.unit));
    A lm = p.mat.scale + log(operator_norm(field, p.mat.unit));
    A r = exp(lw - 2 * lm);
    return r > 1 ? A(1) : r;
  }
}

/// log(|a_2| / |a_1|) of the tracked product.
template <LocalField F>
double log_ratio(const F& field, const TrackedProduct<F>& p) {
  if constexpr (F::exact) {
    return field.log_abs(ratio(field, p));
  } else {
    return log_norm(field, p.wedge) - 2 * log_norm(field, p.mat);
  }
}

/// log ||product * x||.
template <LocalField F>
double log_norm_applied(const F& field, const ScaledMatrix<F>& m, const Vector<typename F::value_type>& x) {
  return log_scale(field, m) + field.log_abs(vector_norm(field, m.unit * x));
}

/// kak_kan_ratio along a trajectory.  For d <= 3 the ratios come from
/// ||g|| / ||g e_1|| and ||wedge^2 g|| / ||g e_1 ^ g e_2|| (both
/// well-conditioned) and det = 1; larger d falls back to decomposing the
/// unit part, which loses the small a_i once they drop below precision.
template <LocalField F>
std::vector<typename F::abs_type> kak_kan_ratio(const F& field, const TrackedProduct<F>& p) {
  using A = typename F::abs_type;
  const std::size_t d = p.mat.unit.rows();
  if (F::exact || d > 3) {
    auto c = kak_general(field, p.mat.unit);
    auto w = iwasawa_general(field, p.mat.unit);
    std::vector<A> out;
    for (std::size_t i = 0; i < d; ++i) out.push_back(field.abs(c.a[i]) / field.abs(w.a[i]));
    return out;
  } else {
    A r1 = operator_norm(field, p.mat.unit) / vector_norm(field, p.mat.unit.column(0));
    if (d == 2) return {r1, A(1) / r1};
    A r12 = operator_norm(field, p.wedge.unit) / vector_norm(field, p.wedge.unit.column(0));
    return {r1, r12 / r1, A(1) / r12};
  }
}

}  // namespace freewalk
