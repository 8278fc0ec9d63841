// Smith normal form and Iwasawa decomposition over the valuation ring Z_(p).

#include "freewalk/decomp.hpp"

namespace freewalk {

namespace {

struct Pivot {
  std::size_t row;
  std::size_t col;
};

// Entry of minimal valuation in rows/cols >= t (rows >= t only when
// col_fixed), ties broken by smallest (row, col).
Pivot find_pivot(const PAdicField& field, const Matrix<Rational>& m, std::size_t t, bool col_fixed) {
  Pivot best{m.rows(), m.cols()};
  long best_val = 0;
  const std::size_t col_end = col_fixed ? t + 1 : m.cols();
  for (std::size_t i = t; i < m.rows(); ++i) {
    for (std::size_t j = t; j < col_end; ++j) {
      if (m(i, j) == 0) continue;
      long v = field.val(m(i, j));
      if (best.row == m.rows() || v < best_val) {
        best = {i, j};
        best_val = v;
      }
    }
  }
  if (best.row == m.rows()) throw DomainError("matrix is singular");
  return best;
}

// Splits x = p^v * unit.
std::pair<long, Rational> split_unit(const PAdicField& field, const Rational& x) {
  long v = field.val(x);
  return {v, x / pow_p(field.prime, v)};
}

}  // namespace

Kak<PAdicField> kak_padic(const PAdicField& field, const Matrix<Rational>& g) {
  if (!g.is_square()) throw UsageError("kak: square matrix expected");
  const std::size_t d = g.rows();
  Matrix<Rational> m = g;
  Matrix<Rational> k = Matrix<Rational>::identity(d);
  Matrix<Rational> u = Matrix<Rational>::identity(d);
  // Invariant: g = k * m * u.
  for (std::size_t t = 0; t < d; ++t) {
    auto [pi, pj] = find_pivot(field, m, t, false);
    if (pi != t) {
      m.swap_rows(pi, t);
      k.swap_cols(pi, t);
    }
    if (pj != t) {
      m.swap_cols(pj, t);
      u.swap_rows(pj, t);
    }
    const Rational pivot = m(t, t);
    for (std::size_t r = t + 1; r < d; ++r) {
      if (m(r, t) == 0) continue;
      Rational c = m(r, t) / pivot;  // valuation >= 0
      for (std::size_t j = t; j < d; ++j) m(r, j) -= c * m(t, j);
      for (std::size_t i = 0; i < d; ++i) k(i, t) += c * k(i, r);
    }
    for (std::size_t s = t + 1; s < d; ++s) {
      if (m(t, s) == 0) continue;
      Rational c = m(t, s) / pivot;
      m(t, s) = 0;
      for (std::size_t j = 0; j < d; ++j) u(t, j) += c * u(s, j);
    }
  }
  Kak<PAdicField> out;
  out.a.resize(d);
  for (std::size_t t = 0; t < d; ++t) {
    auto [v, unit] = split_unit(field, m(t, t));
    out.a[t] = pow_p(field.prime, v);
    for (std::size_t i = 0; i < d; ++i) k(i, t) *= unit;
  }
  out.k = std::move(k);
  out.u = std::move(u);
  out.v = normalize_representative(field, out.k.column(0));
  out.h = normalize_representative(field, out.u.row(0));
  return out;
}

Iwasawa<PAdicField> iwasawa_padic(const PAdicField& field, const Matrix<Rational>& g) {
  if (!g.is_square()) throw UsageError("iwasawa: square matrix expected");
  const std::size_t d = g.rows();
  Matrix<Rational> m = g;
  Matrix<Rational> k = Matrix<Rational>::identity(d);
  // Invariant: g = k * m; m becomes upper triangular.
  for (std::size_t t = 0; t < d; ++t) {
    auto [pi, pj] = find_pivot(field, m, t, true);
    (void)pj;
    if (pi != t) {
      m.swap_rows(pi, t);
      k.swap_cols(pi, t);
    }
    const Rational pivot = m(t, t);
    for (std::size_t r = t + 1; r < d; ++r) {
      if (m(r, t) == 0) continue;
      Rational c = m(r, t) / pivot;
      for (std::size_t j = t; j < d; ++j) m(r, j) -= c * m(t, j);
      for (std::size_t i = 0; i < d; ++i) k(i, t) += c * k(i, r);
    }
  }
  Iwasawa<PAdicField> out;
  out.a.resize(d);
  out.n = Matrix<Rational>(d, d);
  for (std::size_t t = 0; t < d; ++t) {
    const Rational diag = m(t, t);
    auto [v, unit] = split_unit(field, diag);
    out.a[t] = pow_p(field.prime, v);
    for (std::size_t i = 0; i < d; ++i) k(i, t) *= unit;
    for (std::size_t j = 0; j < d; ++j) out.n(t, j) = j < t ? Rational(0) : Rational(m(t, j) / diag);
  }
  out.k = std::move(k);
  return out;
}

}  // namespace freewalk
