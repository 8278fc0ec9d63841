#include <boost/multiprecision/eigen.hpp>

#include "freewalk/multiprecision.hpp"
#include "real_linalg_impl.hpp"

namespace freewalk {

template RealSvd<Real50> svd_sorted<Real50>(const Matrix<Real50>&);
template RealQr<Real50> qr_positive<Real50>(const Matrix<Real50>&);
template Real50 largest_singular_value<Real50>(const Matrix<Real50>&);

}  // namespace freewalk
