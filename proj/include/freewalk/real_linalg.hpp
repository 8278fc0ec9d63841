#pragma once

// Dense real decompositions backed by Eigen.  Instantiated for double here
// and for the extended-precision type in multiprecision.hpp.

#include <vector>

#include "freewalk/matrix.hpp"

namespace freewalk {

/// g = u * diag(sigma) * vt with sigma sorted descending.  When both u and
/// vt have determinant -1 the last column of u and the last row of vt are
/// negated, so that for det g > 0 both factors are rotations.
template <class T>
struct RealSvd {
  Matrix<T> u;
  std::vector<T> sigma;
  Matrix<T> vt;
};

template <class T>
RealSvd<T> svd_sorted(const Matrix<T>& g);

/// g = q * r with q orthogonal and r upper triangular with positive diagonal.
template <class T>
struct RealQr {
  Matrix<T> q;
  Matrix<T> r;
};

template <class T>
RealQr<T> qr_positive(const Matrix<T>& g);

/// Largest singular value.
template <class T>
T largest_singular_value(const Matrix<T>& g);

/// Moduli of the (complex) eigenvalues, sorted descending (double only).
template <class T>
std::vector<double> eigenvalue_moduli(const Matrix<T>& g);

extern template RealSvd<double> svd_sorted<double>(const Matrix<double>&);
extern template RealQr<double> qr_positive<double>(const Matrix<double>&);
extern template double largest_singular_value<double>(const Matrix<double>&);
extern template std::vector<double> eigenvalue_moduli<double>(const Matrix<double>&);

}  // namespace freewalk
