#include "real_linalg_impl.hpp"

#include <Eigen/Eigenvalues>

namespace freewalk {

template <class T>
std::vector<double> eigenvalue_moduli(const Matrix<T>& g) {
  Eigen::EigenSolver<detail::EigenMatrix<T>> solver(detail::to_eigen(g), false);
  std::vector<double> moduli;
  for (const auto& lambda : solver.eigenvalues()) moduli.push_back(std::abs(lambda));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli;
}

template RealSvd<double> svd_sorted<double>(const Matrix<double>&);
template RealQr<double> qr_positive<double>(const Matrix<double>&);
template double largest_singular_value<double>(const Matrix<double>&);
template std::vector<double> eigenvalue_moduli<double>(const Matrix<double>&);

}  // namespace freewalk
