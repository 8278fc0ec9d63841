#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "freewalk/errors.hpp"

namespace freewalk {

using Integer = mpz_class;
using Rational = mpq_class;

enum class FieldKind { archimedean, nonarchimedean };

/// The working local field: the reals, or Q with the p-adic absolute value.
struct FieldSpec {
  FieldKind kind = FieldKind::archimedean;
  std::uint32_t prime = 0;  // only meaningful for nonarchimedean

  static FieldSpec real() { return {}; }
  static FieldSpec padic(std::uint32_t p);

  bool is_archimedean() const { return kind == FieldKind::archimedean; }
  std::string to_string() const;

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

bool is_prime(std::uint64_t n);

/// p-adic valuation; std::nullopt stands for v(0) = +infinity.
std::optional<long> valuation(const Integer& x, std::uint32_t p);
std::optional<long> valuation(const Rational& x, std::uint32_t p);

/// p^e as an exact rational (e may be negative).
Rational pow_p(std::uint32_t p, long e);

/// |x|_p = p^{-v_p(x)}, |0|_p = 0.
Rational padic_abs(const Rational& x, std::uint32_t p);

/// Parses "num/den", an integer, or a decimal literal ("-1.25e-3") exactly.
Rational parse_rational(std::string_view text);
/// "num/den" in lowest terms; the denominator is always printed.
std::string format_rational(const Rational& x);
/// Shortest decimal literal that round-trips through strtod.
std::string format_real(double x);
/// Fixed significant-digit rendering used for experiment output.
std::string format_fixed(double x, int significant = 12);

inline double to_double(const Rational& x) { return x.get_d(); }
template <class T>
double to_double(const T& x) {
  return static_cast<double>(x);
}

// ---------------------------------------------------------------------------
// Field policies.  Algorithms are templated on one of these; the policy fixes
// the element type, the type of absolute values and the norm conventions.

template <class T>
struct RealField {
  using value_type = T;
  using abs_type = T;
  using scale_type = T;  // natural log of a positive factor
  static constexpr bool exact = false;

  FieldSpec spec() const { return FieldSpec::real(); }
  abs_type abs(const T& x) const {
    using std::abs;
    return abs(x);
  }
  double log_abs(const abs_type& a) const {
    using std::log;
    return to_double(log(a));
  }
  T from_rational(const Rational& q) const {
    if constexpr (std::is_same_v<T, double>) {
      return q.get_d();
    } else {
      return T(q.get_num().get_str()) / T(q.get_den().get_str());
    }
  }
  abs_type threshold(double t) const { return T(t); }
};

struct PAdicField {
  using value_type = Rational;
  using abs_type = Rational;  // exact: always 0 or a power of p
  using scale_type = long;    // exponent m in p^m
  static constexpr bool exact = true;

  std::uint32_t prime = 2;

  explicit PAdicField(std::uint32_t p);
  FieldSpec spec() const { return FieldSpec::padic(prime); }
  abs_type abs(const Rational& x) const { return padic_abs(x, prime); }
  double log_abs(const abs_type& a) const;
  long val(const Rational& x) const;  // throws on zero
  Rational from_rational(const Rational& q) const { return q; }
  // Doubles are dyadic rationals, so thresholds convert exactly.
  abs_type threshold(double t) const { return Rational(t); }
};

using Reals = RealField<double>;

template <class F>
concept LocalField = requires(const F& f) {
  typename F::value_type;
  typename F::abs_type;
  { F::exact } -> std::convertible_to<bool>;
  { f.spec() } -> std::same_as<FieldSpec>;
};

// ---------------------------------------------------------------------------
// Runtime-typed scalar for I/O and bindings.

class Scalar {
 public:
  Scalar() : value_(0.0) {}
  Scalar(double x) : value_(x) {}  // NOLINT(google-explicit-constructor)
  Scalar(Rational x) : value_(std::move(x)) {}  // NOLINT

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  double as_double() const;
  const Rational& as_rational() const;  // UsageError if not exact

  std::string to_string() const;

 private:
  std::variant<double, Rational> value_;
};

/// |x| in `field`; archimedean fields use the usual absolute value.
double abs_value(const Scalar& x, const FieldSpec& field);
/// v_p(x); UsageError for a floating-point scalar.
std::optional<long> valuation(const Scalar& x, std::uint32_t p);

}  // namespace freewalk
