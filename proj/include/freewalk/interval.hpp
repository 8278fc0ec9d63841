#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "freewalk/errors.hpp"
#include "freewalk/scalar.hpp"

namespace freewalk {

/// Closed interval [lo, hi] of doubles with outward rounding: every
/// operation widens its floating-point result by one ulp on each side, so
/// the exact result of the operation on any points of the operands is
/// enclosed.
class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT(google-explicit-constructor)
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw DomainError("Interval: lo > hi");
  }

  /// Smallest representable enclosure of an exact rational.
  static Interval enclose(const Rational& q);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return 0.5 * (lo_ + hi_); }
  double width() const { return hi_ - lo_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return widen(a.lo_ + b.lo_, a.hi_ + b.hi_);
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return widen(a.lo_ - b.hi_, a.hi_ - b.lo_);
  }
  friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }
  friend Interval operator*(const Interval& a, const Interval& b) {
    const double p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    return widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DomainError("Interval division by an interval containing zero");
    const double p[4] = {a.lo_ / b.lo_, a.lo_ / b.hi_, a.hi_ / b.lo_, a.hi_ / b.hi_};
    return widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
  }
  Interval& operator+=(const Interval& b) { return *this = *this + b; }
  Interval& operator-=(const Interval& b) { return *this = *this - b; }
  Interval& operator*=(const Interval& b) { return *this = *this * b; }

  friend Interval square(const Interval& a) {
    if (a.lo_ >= 0) return widen(a.lo_ * a.lo_, a.hi_ * a.hi_);
    if (a.hi_ <= 0) return widen(a.hi_ * a.hi_, a.lo_ * a.lo_);
    double m = std::max(-a.lo_, a.hi_);
    return widen(0.0, m * m);
  }
  friend Interval abs(const Interval& a) {
    if (a.lo_ >= 0) return a;
    if (a.hi_ <= 0) return -a;
    return Interval(0.0, std::max(-a.lo_, a.hi_));
  }
  friend Interval sqrt(const Interval& a) {
    if (a.hi_ < 0) throw DomainError("Interval sqrt of a negative interval");
    double lo = a.lo_ <= 0 ? 0.0 : std::sqrt(a.lo_);
    return widen(lo, std::sqrt(a.hi_));
  }
  friend Interval max(const Interval& a, const Interval& b) {
    return Interval(std::max(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
  }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo_ == b.lo_ && a.hi_ == b.hi_; }

  friend std::ostream& operator<<(std::ostream& os, const Interval& a) {
    return os << '[' << a.lo_ << ", " << a.hi_ << ']';
  }

 private:
  static Interval widen(double lo, double hi) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Interval r;
    r.lo_ = std::nextafter(lo, -inf);
    r.hi_ = std::nextafter(hi, inf);
    return r;
  }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval Interval::enclose(const Rational& q) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double d = q.get_d();  // truncates toward zero
  if (Rational(d) == q) return Interval(d);
  return Interval(std::nextafter(d, -inf), std::nextafter(d, inf));
}

}  // namespace freewalk
