#include "freewalk/pingpong.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace freewalk {

namespace {

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<Rational> exact(const std::vector<double>& x) {
  std::vector<Rational> out;
  for (double v : x) out.emplace_back(v);
  return out;
}

double sqrt_upper(const Rational& q) { return sqrt(Interval::enclose(q)).hi(); }
double sqrt_lower(const Rational& q) { return sqrt(Interval::enclose(q)).lo(); }

// Rigorous bound on sin(angle(x, top eigenvector of s)) for a symmetric
// positive semidefinite s whose second eigenvalue is at most f2 / rho, where
// rho is the Rayleigh quotient of x.  Also returns rho.
std::pair<double, Rational> eigvec_error(const Matrix<Rational>& s, const std::vector<Rational>& x,
                                         const Rational& f2) {
  const std::size_t d = x.size();
  const Rational xx = dot(x, x);
  std::vector<Rational> sx(d, Rational(0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) sx[i] += s(i, j) * x[j];
  const Rational rho = dot(x, sx) / xx;
  if (rho <= 0) return {1.0, rho};
  Rational res2(0);
  for (std::size_t i = 0; i < d; ++i) {
    Rational r = sx[i] - rho * x[i];
    res2 += r * r;
  }
  res2 /= xx;
  const Rational gap = rho - f2 / rho;
  if (gap <= 0) return {1.0, rho};
  double err = sqrt_upper(res2 / (gap * gap));
  return {std::min(err, 1.0), rho};
}

// Lower bound of delta([x], Ker f) for exact coordinates.
double separation_lower(const std::vector<Rational>& x, const std::vector<Rational>& f) {
  Rational fx = dot(f, x);
  return sqrt_lower(fx * fx / (dot(f, f) * dot(x, x)));
}

double minus_errors(double value_lower, double e1, double e2) {
  Interval err = Interval(std::sqrt(2.0)) * (Interval(e1) + Interval(e2));
  // sqrt(2.0) is rounded, so inflate a little
  err = err * Interval(1.0, 1.0 + 4e-16);
  return (Interval(value_lower) - err).lo();
}

}  // namespace

CertifiedContraction certify_contraction(const Matrix<Rational>& g, double eps) {
  detail::check_eps(eps);
  auto svd = svd_sorted(g.cast<double>());
  CertifiedContraction out;
  out.v = svd.u.column(0);
  out.h = svd.vt.row(0);

  const Matrix<Rational> gt = g.transpose();
  const Matrix<Rational> left = g * gt;    // top eigenvector: attracting point
  const Matrix<Rational> right = gt * g;   // top eigenvector: repelling covector
  Rational f2(0);  // squared Frobenius norm of wedge^2 g bounds (a_1 a_2)^2
  const Matrix<Rational> wedge = exterior_square(g);
  for (const auto& w : wedge.data()) f2 += w * w;

  auto [ev, rho_l] = eigvec_error(left, exact(out.v.entries()), f2);
  auto [eh, rho_r] = eigvec_error(right, exact(out.h.entries()), f2);
  out.v_error = ev;
  out.h_error = eh;
  Rational rho = std::max(rho_l, rho_r);  // both are lower bounds of a_1^2
  if (rho > 0) {
    Rational ratio2 = f2 / (rho * rho);
    out.ratio_upper = std::min(1.0, sqrt_upper(ratio2));
    Rational e(eps);
    out.ratio_ok = ratio2 <= e * e * e * e;
  }
  out.separation_lower =
      std::max(0.0, minus_errors(separation_lower(exact(out.v.entries()), exact(out.h.entries())), ev, eh));
  return out;
}

CertifiedReport certify_pingpong_real(const std::vector<Matrix<Rational>>& gs, double r, double eps) {
  detail::check_r_eps(r, eps);
  if (gs.size() < 2) throw UsageError("a ping-pong tuple needs at least two generators");
  CertifiedReport rep;
  rep.r = r;
  rep.eps = eps;
  for (const auto& g : gs) {
    if (!g.is_square() || determinant(g) != 1) throw InvariantError("generator is not in SL_d");
    rep.players.push_back({certify_contraction(g, eps), certify_contraction(inverse(g), eps)});
  }
  const std::size_t m = gs.size();
  for (const auto& p : rep.players) {
    for (std::size_t s = 0; s < 2; ++s) {
      if (!p[s].ratio_ok) rep.own_contraction_failed = true;
      if (!(p[s].separation_lower > r)) rep.own_separation_failed = true;
    }
  }
  rep.cross_lower = Matrix<double>(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t t = 0; t < 2; ++t) {
          const auto& a = rep.players[i][s];
          const auto& b = rep.players[j][t];
          double lower = std::max(
              0.0, minus_errors(separation_lower(exact(a.v.entries()), exact(b.h.entries())), a.v_error, b.h_error));
          rep.cross_lower(2 * i + s, 2 * j + t) = lower;
          if (i != j && !(lower >= r)) rep.cross_margin_failed = true;
        }
      }
    }
  }
  rep.certified = !rep.own_contraction_failed && !rep.own_separation_failed && !rep.cross_margin_failed;
  return rep;
}

// ---------------------------------------------------------------------------
// Word oracle.

namespace {

struct Overflow {};

struct SmallMat {
  std::size_t d = 0;
  std::array<std::int64_t, 16> e{};

  friend SmallMat operator*(const SmallMat& a, const SmallMat& b) {
    SmallMat c;
    c.d = a.d;
    for (std::size_t i = 0; i < a.d; ++i) {
      for (std::size_t j = 0; j < a.d; ++j) {
        std::int64_t s = 0;
        for (std::size_t k = 0; k < a.d; ++k) {
          std::int64_t p;
          if (__builtin_mul_overflow(a.e[i * a.d + k], b.e[k * a.d + j], &p) || __builtin_add_overflow(s, p, &s)) {
            throw Overflow{};
          }
        }
        c.e[i * a.d + j] = s;
      }
    }
    return c;
  }
  bool is_identity() const {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (e[i * d + j] != (i == j ? 1 : 0)) return false;
    return true;
  }
};

std::optional<SmallMat> to_small(const Matrix<Rational>& g) {
  if (g.rows() > 4) return std::nullopt;
  SmallMat m;
  m.d = g.rows();
  for (std::size_t i = 0; i < m.d; ++i) {
    for (std::size_t j = 0; j < m.d; ++j) {
      const Rational& x = g(i, j);
      if (x.get_den() != 1 || !x.get_num().fits_slong_p()) return std::nullopt;
      m.e[i * m.d + j] = x.get_num().get_si();
    }
  }
  return m;
}

bool is_identity(const Matrix<Rational>& g) { return g == Matrix<Rational>::identity(g.rows()); }
bool is_identity(const SmallMat& g) { return g.is_identity(); }

char letter(std::size_t idx) {
  char base = static_cast<char>('a' + idx / 2);
  return idx % 2 == 0 ? base : static_cast<char>(base - 'a' + 'A');
}

std::size_t letter_index(char c) {
  if (c >= 'a' && c <= 'z') return 2 * static_cast<std::size_t>(c - 'a');
  if (c >= 'A' && c <= 'Z') return 2 * static_cast<std::size_t>(c - 'A') + 1;
  throw UsageError(std::string("invalid letter '") + c + "' in word");
}

// Depth-first enumeration of reduced words in (letter index) lexicographic
// order.  `visit` returns false to stop extending the current word.
template <class M, class Visit>
void enumerate(const std::vector<M>& letters, const M& prefix, std::string& word, std::size_t last, int max_len,
               Visit& visit) {
  for (std::size_t idx = 0; idx < letters.size(); ++idx) {
    if (!word.empty() && (idx ^ 1) == last) continue;  // would cancel
    if (static_cast<int>(word.size()) >= max_len) return;
    M next = prefix * letters[idx];
    word.push_back(letter(idx));
    if (visit(word, next)) enumerate(letters, next, word, idx, max_len, visit);
    word.pop_back();
  }
}

void check_generators(const std::vector<Matrix<Rational>>& gs, int max_len) {
  if (gs.empty()) throw UsageError("word oracle needs at least one generator");
  if (gs.size() > 26) throw UsageError("word oracle supports at most 26 generators");
  if (max_len < 1 || max_len > 16) throw UsageError("max_len must lie in [1, 16]");
  for (const auto& g : gs) {
    if (!g.is_square() || g.rows() != gs[0].rows()) throw UsageError("generators must be square of equal size");
  }
}

template <class M>
std::vector<M> letters_of(const std::vector<M>& gens, const std::vector<M>& invs) {
  std::vector<M> letters;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    letters.push_back(gens[i]);
    letters.push_back(invs[i]);
  }
  return letters;
}

// Runs `search` on the int64 fast path when every generator and inverse is
// integral, falling back to exact rationals on overflow.
template <class Search>
auto with_letters(const std::vector<Matrix<Rational>>& gs, Search&& search) {
  std::vector<Matrix<Rational>> invs;
  for (const auto& g : gs) invs.push_back(inverse(g));
  std::vector<SmallMat> small_g, small_i;
  bool small = true;
  for (std::size_t i = 0; i < gs.size() && small; ++i) {
    auto a = to_small(gs[i]);
    auto b = to_small(invs[i]);
    if (!a || !b) {
      small = false;
      break;
    }
    small_g.push_back(*a);
    small_i.push_back(*b);
  }
  if (small) {
    try {
      SmallMat id;
      id.d = gs[0].rows();
      for (std::size_t i = 0; i < id.d; ++i) id.e[i * id.d + i] = 1;
      return search(letters_of(small_g, small_i), id);
    } catch (const Overflow&) {
    }
  }
  return search(letters_of(gs, invs), Matrix<Rational>::identity(gs[0].rows()));
}

}  // namespace

bool is_reduced(const std::string& word) {
  for (std::size_t i = 1; i < word.size(); ++i) {
    if ((letter_index(word[i]) ^ 1) == letter_index(word[i - 1])) return false;
  }
  return true;
}

Matrix<Rational> evaluate_word(const std::vector<Matrix<Rational>>& gs, const std::string& word) {
  if (gs.empty()) throw UsageError("evaluate_word needs generators");
  Matrix<Rational> out = Matrix<Rational>::identity(gs[0].rows());
  for (char c : word) {
    std::size_t idx = letter_index(c);
    if (idx / 2 >= gs.size()) throw UsageError(std::string("letter '") + c + "' has no generator");
    out = out * (idx % 2 == 0 ? gs[idx / 2] : inverse(gs[idx / 2]));
  }
  return out;
}

WordVerdict free_word_oracle(const std::vector<Matrix<Rational>>& gs, int max_len) {
  check_generators(gs, max_len);
  return with_letters(gs, [&](const auto& letters, const auto& id) {
    WordVerdict best;
    int limit = max_len;
    std::string word;
    auto visit = [&](const std::string& w, const auto& m) {
      if (static_cast<int>(w.size()) > limit) return false;
      if (is_identity(m)) {
        if (!best.relation_found || w.size() < best.word.size()) {
          best = {true, w};
          limit = static_cast<int>(w.size()) - 1;
        }
        return false;
      }
      return static_cast<int>(w.size()) < limit;
    };
    enumerate(letters, id, word, 0, max_len, visit);
    return best;
  });
}

std::vector<std::string> find_relations(const std::vector<Matrix<Rational>>& gs, int max_len, std::size_t limit) {
  check_generators(gs, max_len);
  auto found = with_letters(gs, [&](const auto& letters, const auto& id) {
    std::vector<std::string> out;
    std::string word;
    auto visit = [&](const std::string& w, const auto& m) {
      if (is_identity(m)) out.push_back(w);
      return true;
    };
    enumerate(letters, id, word, 0, max_len, visit);
    return out;
  });
  auto key = [](const std::string& w) {
    std::vector<std::size_t> k;
    for (char c : w) k.push_back(letter_index(c));
    return k;
  };
  std::stable_sort(found.begin(), found.end(), [&](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return key(a) < key(b);
  });
  if (found.size() > limit) found.resize(limit);
  return found;
}

}  // namespace freewalk
