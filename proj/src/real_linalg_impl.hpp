#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>

#include "freewalk/real_linalg.hpp"

namespace freewalk::detail {

template <class T>
using EigenMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
EigenMatrix<T> to_eigen(const Matrix<T>& g) {
  EigenMatrix<T> m(g.rows(), g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) m(i, j) = g(i, j);
  return m;
}

template <class T>
Matrix<T> from_eigen(const EigenMatrix<T>& m) {
  Matrix<T> g(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) g(i, j) = m(i, j);
  return g;
}

}  // namespace freewalk::detail

namespace freewalk {

template <class T>
RealSvd<T> svd_sorted(const Matrix<T>& g) {
  if (!g.is_square()) throw UsageError("svd_sorted: square matrix expected");
  Eigen::JacobiSVD<detail::EigenMatrix<T>> svd(detail::to_eigen(g), Eigen::ComputeFullU | Eigen::ComputeFullV);
  // JacobiSVD already sorts singular values in decreasing order.
  RealSvd<T> out;
  out.u = detail::from_eigen<T>(svd.matrixU());
  out.vt = detail::from_eigen<T>(svd.matrixV().transpose());
  const auto& s = svd.singularValues();
  out.sigma.assign(s.data(), s.data() + s.size());
  const std::size_t d = g.rows();
  if (determinant(out.u) < 0 && determinant(out.vt) < 0) {
    for (std::size_t i = 0; i < d; ++i) {
      out.u(i, d - 1) = -out.u(i, d - 1);
      out.vt(d - 1, i) = -out.vt(d - 1, i);
    }
  }
  return out;
}

template <class T>
RealQr<T> qr_positive(const Matrix<T>& g) {
  if (!g.is_square()) throw UsageError("qr_positive: square matrix expected");
  Eigen::HouseholderQR<detail::EigenMatrix<T>> qr(detail::to_eigen(g));
  detail::EigenMatrix<T> q = qr.householderQ();
  detail::EigenMatrix<T> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (r(i, i) < 0) {
      r.row(i) = -r.row(i);
      q.col(i) = -q.col(i);
    }
  }
  return {detail::from_eigen<T>(q), detail::from_eigen<T>(r)};
}

template <class T>
T largest_singular_value(const Matrix<T>& g) {
  if (g.rows() == 2 && g.cols() == 2) {
    // sigma_1^2 = (f + sqrt((f - 2|det|)(f + 2|det|))) / 2 with f the squared
    // Frobenius norm; no cancellation, and exact for scaled isometries.
    using std::abs;
    using std::sqrt;
    const T f = g(0, 0) * g(0, 0) + g(0, 1) * g(0, 1) + g(1, 0) * g(1, 0) + g(1, 1) * g(1, 1);
    const T det = abs(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0));
    T disc = (f - 2 * det) * (f + 2 * det);
    if (disc < 0) disc = 0;
    return sqrt((f + sqrt(disc)) / 2);
  }
  Eigen::JacobiSVD<detail::EigenMatrix<T>> svd(detail::to_eigen(g));
  return svd.singularValues()(0);
}

}  // namespace freewalk
