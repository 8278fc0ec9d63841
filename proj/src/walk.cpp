#include "freewalk/walk.hpp"

namespace freewalk {

std::vector<Rational> characteristic_polynomial(const Matrix<Rational>& g) {
  const std::size_t d = g.rows();
  std::vector<Rational> c(d + 1, Rational(0));
  c[d] = 1;
  Matrix<Rational> m(d, d);  // M_0 = 0
  for (std::size_t k = 1; k <= d; ++k) {
    m = g * m;
    for (std::size_t i = 0; i < d; ++i) m(i, i) += c[d - k + 1];
    Matrix<Rational> am = g * m;
    Rational trace(0);
    for (std::size_t i = 0; i < d; ++i) trace += am(i, i);
    c[d - k] = -trace / static_cast<long>(k);
  }
  return c;
}

bool padic_proximal(const Matrix<Rational>& g, std::uint32_t p) {
  const auto c = characteristic_polynomial(g);
  const std::size_t d = g.rows();
  auto top = valuation(c[d - 1], p);
  if (!top) return false;
  // The last Newton-polygon edge ends at (d, 0); its slope is the maximum of
  // -v(c_i)/(d-i).  A unique dominant root means that maximum is attained
  // only at i = d-1.
  const Rational slope(-*top);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    auto v = valuation(c[i], p);
    if (!v) continue;
    Rational s(-*v, static_cast<long>(d - i));
    s.canonicalize();
    if (s >= slope) return false;
  }
  return true;
}

bool real_proximal(const Matrix<double>& g, double rel_gap) {
  auto moduli = eigenvalue_moduli(g);
  if (moduli.size() < 2 || moduli[0] == 0) return false;
  return moduli[0] - moduli[1] > rel_gap * moduli[0];
}

}  // namespace freewalk
