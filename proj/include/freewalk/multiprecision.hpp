#pragma once

// Extended-precision reals for experiments whose projective distances fall
// below double resolution (they decay like exp(-2 (lambda1 - lambda2) n)).

#include <boost/multiprecision/mpfr.hpp>

#include "freewalk/real_linalg.hpp"

namespace freewalk {

/// 50 significant decimal digits, expression templates disabled so that
/// `auto` and Eigen behave like with builtin floating types.
using Real50 = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<50>,
                                             boost::multiprecision::et_off>;

using Reals50 = RealField<Real50>;

extern template RealSvd<Real50> svd_sorted<Real50>(const Matrix<Real50>&);
extern template RealQr<Real50> qr_positive<Real50>(const Matrix<Real50>&);
extern template Real50 largest_singular_value<Real50>(const Matrix<Real50>&);

}  // namespace freewalk
