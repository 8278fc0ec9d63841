#include "freewalk/scalar.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace freewalk {

FieldSpec FieldSpec::padic(std::uint32_t p) {
  if (!is_prime(p)) {
    throw DomainError("nonarchimedean field needs a prime, got " + std::to_string(p));
  }
  return {FieldKind::nonarchimedean, p};
}

std::string FieldSpec::to_string() const {
  if (is_archimedean()) return "real";
  return "Q_" + std::to_string(prime);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::optional<long> valuation(const Integer& x, std::uint32_t p) {
  if (x == 0) return std::nullopt;
  Integer rest;
  Integer prime(p);
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), prime.get_mpz_t()));
}

std::optional<long> valuation(const Rational& x, std::uint32_t p) {
  if (x == 0) return std::nullopt;
  return *valuation(x.get_num(), p) - *valuation(x.get_den(), p);
}

Rational pow_p(std::uint32_t p, long e) {
  Integer power;
  mpz_ui_pow_ui(power.get_mpz_t(), p, static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return Rational(power);
  Rational r(Integer(1), power);
  r.canonicalize();
  return r;
}

Rational padic_abs(const Rational& x, std::uint32_t p) {
  auto v = valuation(x, p);
  if (!v) return Rational(0);
  return pow_p(p, -*v);
}

PAdicField::PAdicField(std::uint32_t p) : prime(p) {
  if (!is_prime(p)) throw DomainError("PAdicField: " + std::to_string(p) + " is not prime");
}

double PAdicField::log_abs(const abs_type& a) const {
  if (a == 0) return -HUGE_VAL;
  // a = p^k exactly, and v_p(p^k) = k
  return static_cast<double>(*valuation(a, prime)) * std::log(static_cast<double>(prime));
}

long PAdicField::val(const Rational& x) const {
  auto v = valuation(x, prime);
  if (!v) throw DomainError("valuation of zero requested");
  return *v;
}

namespace {

Integer parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) throw UsageError("cannot parse number '" + std::string(whole) + "'");
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) throw UsageError("cannot parse number '" + std::string(whole) + "'");
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') throw UsageError("cannot parse number '" + std::string(whole) + "'");
  }
  std::string digits(s[0] == '+' ? s.substr(1) : s);
  return Integer(digits, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(s.substr(0, slash), text);
    Integer den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw UsageError("zero denominator in '" + std::string(text) + "'");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  // decimal: [sign] digits [. digits] [e [sign] digits]
  long exponent = 0;
  std::string_view mantissa = s;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    std::string_view ex = s.substr(e + 1);
    Integer ev = parse_integer(ex, text);
    if (!ev.fits_slong_p()) throw UsageError("exponent out of range in '" + std::string(text) + "'");
    exponent = ev.get_si();
  }
  std::string digits;
  bool negative = false;
  std::size_t i = 0;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    i = 1;
  }
  bool seen_dot = false;
  bool any_digit = false;
  for (; i < mantissa.size(); ++i) {
    char c = mantissa[i];
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_dot) --exponent;
    } else {
      throw UsageError("cannot parse number '" + std::string(text) + "'");
    }
  }
  if (!any_digit) throw UsageError("cannot parse number '" + std::string(text) + "'");
  Integer m(digits, 10);
  if (negative) m = -m;
  Integer ten_power;
  mpz_ui_pow_ui(ten_power.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent >= 0 ? Rational(m * ten_power) : Rational(m, ten_power);
  r.canonicalize();
  return r;
}

std::string format_rational(const Rational& x) {
  Rational q = x;
  q.canonicalize();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf, end);
}

std::string format_fixed(double x, int significant) {
  if (x == 0.0) return "0";  // avoids "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, x);
  return buf;
}

double Scalar::as_double() const {
  if (auto* q = std::get_if<Rational>(&value_)) return q->get_d();
  return std::get<double>(value_);
}

const Rational& Scalar::as_rational() const {
  if (auto* q = std::get_if<Rational>(&value_)) return *q;
  throw UsageError("scalar is not an exact rational");
}

std::string Scalar::to_string() const {
  if (auto* q = std::get_if<Rational>(&value_)) return format_rational(*q);
  return format_real(std::get<double>(value_));
}

double abs_value(const Scalar& x, const FieldSpec& field) {
  if (field.is_archimedean()) return std::fabs(x.as_double());
  if (!x.is_exact()) throw UsageError("nonarchimedean absolute value needs an exact rational");
  auto v = valuation(x.as_rational(), field.prime);
  if (!v) return 0.0;
  return std::pow(static_cast<double>(field.prime), static_cast<double>(-*v));
}

std::optional<long> valuation(const Scalar& x, std::uint32_t p) {
  if (!x.is_exact()) throw UsageError("valuation is undefined for an archimedean scalar");
  if (!is_prime(p)) throw DomainError("valuation needs a prime, got " + std::to_string(p));
  return valuation(x.as_rational(), p);
}

}  // namespace freewalk
