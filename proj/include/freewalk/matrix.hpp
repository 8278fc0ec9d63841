#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "freewalk/errors.hpp"
#include "freewalk/scalar.hpp"

namespace freewalk {

struct VectorTag {};
struct CovectorTag {};

/// Coordinates of an element of k^d (VectorTag) or of its dual (CovectorTag).
template <class T, class Tag>
class Coords {
 public:
  Coords() = default;
  explicit Coords(std::size_t d, const T& fill = T(0)) : entries_(d, fill) {}
  Coords(std::initializer_list<T> init) : entries_(init) {}
  explicit Coords(std::vector<T> entries) : entries_(std::move(entries)) {}

  static Coords basis(std::size_t d, std::size_t i) {
    Coords e(d);
    e[i] = T(1);
    return e;
  }

  std::size_t size() const { return entries_.size(); }
  T& operator[](std::size_t i) { return entries_[i]; }
  const T& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::span<const T> view() const { return entries_; }
  const std::vector<T>& entries() const { return entries_; }

  bool is_zero() const {
    for (const T& x : entries_) {
      if (x != 0) return false;
    }
    return true;
  }

  friend bool operator==(const Coords&, const Coords&) = default;

 private:
  std::vector<T> entries_;
};

template <class T>
using Vector = Coords<T, VectorTag>;
template <class T>
using Covector = Coords<T, CovectorTag>;

/// f(x) = sum_i f_i x_i.
template <class T>
T evaluate(const Covector<T>& f, const Vector<T>& x) {
  assert(f.size() == x.size());
  T s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += f[i] * x[i];
  return s;
}

namespace detail {

template <class U, class T>
U convert(const T& x) {
  if constexpr (std::is_same_v<T, Rational> && std::is_same_v<U, double>) {
    return x.get_d();
  } else {
    return U(x);
  }
}

}  // namespace detail

/// Dense row-major matrix.  Small (d <= a handful), so no blocking.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw UsageError("Matrix: ragged initializer");
      for (const T& x : r) data_.push_back(x);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix diagonal(std::span<const T> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const T> data() const { return data_; }

  Vector<T> column(std::size_t j) const {
    Vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  Covector<T> row(std::size_t i) const {
    Covector<T> r(cols_);
    for (std::size_t j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = detail::convert<U>((*this)(i, j));
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw UsageError("Matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }
  friend Vector<T> operator*(const Matrix& a, const Vector<T>& x) {
    if (a.cols_ != x.size()) throw UsageError("Matrix-vector product: shape mismatch");
    Vector<T> y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      T s(0);
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
  /// Row covector times matrix: (f g)_j = sum_i f_i g_ij.
  friend Covector<T> operator*(const Covector<T>& f, const Matrix& a) {
    if (a.rows_ != f.size()) throw UsageError("covector-matrix product: shape mismatch");
    Covector<T> y(a.cols_);
    for (std::size_t j = 0; j < a.cols_; ++j) {
      T s(0);
      for (std::size_t i = 0; i < a.rows_; ++i) s += f[i] * a(i, j);
      y[j] = s;
    }
    return y;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw UsageError("Matrix difference: shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }
  Matrix& operator*=(const T& s) {
    for (T& x : data_) x *= s;
    return *this;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

namespace detail {

template <class T>
bool better_pivot(const T& candidate, const T& current) {
  if constexpr (std::is_same_v<T, Rational>) {
    return current == 0 && candidate != 0;
  } else {
    using std::abs;
    return abs(candidate) > abs(current);
  }
}

}  // namespace detail

/// Determinant by Gaussian elimination (partial pivoting for inexact types,
/// first nonzero pivot for exact ones).
template <class T>
T determinant(Matrix<T> m) {
  if (!m.is_square()) throw UsageError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  T det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (detail::better_pivot(m(r, c), m(piv, c))) piv = r;
    }
    if (m(piv, c) == 0) return T(0);
    if (piv != c) {
      m.swap_rows(piv, c);
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m(r, c) == 0) continue;
      T factor = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= factor * m(c, j);
    }
  }
  return det;
}

/// Inverse by Gauss-Jordan elimination.
template <class T>
Matrix<T> inverse(Matrix<T> m) {
  if (!m.is_square()) throw UsageError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Matrix<T> inv = Matrix<T>::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (detail::better_pivot(m(r, c), m(piv, c))) piv = r;
    }
    if (m(piv, c) == 0) throw DomainError("inverse of a singular matrix");
    m.swap_rows(piv, c);
    inv.swap_rows(piv, c);
    T p = m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) /= p;
      inv(c, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m(r, c) == 0) continue;
      T factor = m(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= factor * m(c, j);
        inv(r, j) -= factor * inv(c, j);
      }
    }
  }
  return inv;
}

/// Index pairs (i<j) of the wedge basis e_i ^ e_j in lexicographic order.
inline std::vector<std::pair<std::size_t, std::size_t>> wedge_basis(std::size_t d) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  return pairs;
}

/// Induced action of g on the second exterior power, in the lexicographic
/// basis (e_i ^ e_j, i<j).  Entry ((i,j),(k,l)) is the 2x2 minor of g on
/// rows {i,j} and columns {k,l}.
template <class T>
Matrix<T> exterior_square(const Matrix<T>& g) {
  if (!g.is_square() || g.rows() < 2) throw UsageError("exterior_square needs a square matrix with d >= 2");
  const auto basis = wedge_basis(g.rows());
  Matrix<T> w(basis.size(), basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const auto [i, j] = basis[r];
    for (std::size_t c = 0; c < basis.size(); ++c) {
      const auto [k, l] = basis[c];
      w(r, c) = g(i, k) * g(j, l) - g(i, l) * g(j, k);
    }
  }
  return w;
}

/// Coordinates of x ^ y in the lexicographic wedge basis.
template <class T>
Vector<T> wedge(const Vector<T>& x, const Vector<T>& y) {
  if (x.size() != y.size()) throw UsageError("wedge: dimension mismatch");
  const auto basis = wedge_basis(x.size());
  Vector<T> w(basis.size());
  for (std::size_t r = 0; r < basis.size(); ++r) {
    const auto [i, j] = basis[r];
    w[r] = x[i] * y[j] - x[j] * y[i];
  }
  return w;
}

}  // namespace freewalk
