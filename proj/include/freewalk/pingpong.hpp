#pragma once

// Contraction and proximality predicates, ping-pong certificates, and the
// exhaustive word oracle used to cross-check them.

#include <optional>
#include <string>
#include <vector>

#include "freewalk/decomp.hpp"
#include "freewalk/interval.hpp"
#include "freewalk/matrix.hpp"
#include "freewalk/projlin.hpp"

namespace freewalk {

/// Attracting point, repelling hyperplane, |a_2/a_1| and delta(v, Ker h).
template <LocalField F>
struct ContractionData {
  using T = typename F::value_type;
  using A = typename F::abs_type;
  Vector<T> v;
  Covector<T> h;
  A ratio{};
  A separation{};
};

template <LocalField F>
ContractionData<F> contraction_data_of(const F& field, const Kak<F>& c) {
  ContractionData<F> out;
  out.v = c.v;
  out.h = c.h;
  out.ratio = field.abs(c.a[1]) / field.abs(c.a[0]);
  out.separation = dist_point_hyperplane(field, c.v, c.h);
  return out;
}

template <LocalField F>
ContractionData<F> contraction_data(const F& field, const Matrix<typename F::value_type>& g) {
  return contraction_data_of(field, kak(field, g));
}

/// Contraction data of a scaled product; the ratio comes from the wedge
/// tracker, so it stays accurate far below machine precision.
template <LocalField F>
ContractionData<F> contraction_data(const F& field, const TrackedProduct<F>& p) {
  auto c = kak_general(field, p.mat.unit);
  ContractionData<F> out;
  out.v = std::move(c.v);
  out.h = std::move(c.h);
  out.ratio = ratio(field, p);
  out.separation = dist_point_hyperplane(field, out.v, out.h);
  return out;
}

namespace detail {

inline void check_eps(double eps) {
  if (!(eps > 0 && eps < 1)) throw DomainError("eps must lie in (0, 1), got " + format_real(eps));
}

inline void check_r_eps(double r, double eps) {
  check_eps(eps);
  if (!(r > 2 * eps)) {
    throw DomainError("need r > 2 eps > 0, got r=" + format_real(r) + " eps=" + format_real(eps));
  }
}

}  // namespace detail

/// Sufficient test only: ratio <= eps^2 implies [g] is eps-contracting with
/// attracting point v and repelling hyperplane Ker h.  A false verdict does
/// not mean g fails to be eps-contracting.
template <LocalField F>
struct ContractionVerdict {
  bool contracting = false;
  ContractionData<F> data;
};

template <LocalField F>
ContractionVerdict<F> is_eps_contracting(const F& field, const Matrix<typename F::value_type>& g, double eps) {
  detail::check_eps(eps);
  auto data = contraction_data(field, g);
  auto e = field.threshold(eps);
  bool ok = data.ratio <= e * e;
  return {ok, std::move(data)};
}

template <LocalField F>
bool is_very_proximal(const F& field, const Matrix<typename F::value_type>& g, double r, double eps) {
  detail::check_r_eps(r, eps);
  const auto rr = field.threshold(r);
  for (const auto& x : {g, inverse(g)}) {
    auto verdict = is_eps_contracting(field, x, eps);
    if (!verdict.contracting || !(verdict.data.separation > rr)) return false;
  }
  return true;
}

/// Contraction data of g and of g^{-1}.
template <LocalField F>
struct PlayerData {
  ContractionData<F> fwd;
  ContractionData<F> inv;

  const ContractionData<F>& operator[](std::size_t s) const { return s == 0 ? fwd : inv; }
};

template <LocalField F>
PlayerData<F> player_data(const F& field, const Matrix<typename F::value_type>& g) {
  return {contraction_data(field, g), contraction_data(field, inverse(g))};
}

/// Outcome of the ping-pong test on m players.  cross(2i+s, 2j+t) is
/// delta(v of g_i^{+-1}, H of g_j^{+-1}) with s,t = 0 for g and 1 for the
/// inverse; only the blocks i != j are constrained.
template <LocalField F>
struct PingPongReport {
  using A = typename F::abs_type;
  bool certified = false;
  bool own_contraction_failed = false;
  bool own_separation_failed = false;
  bool cross_margin_failed = false;
  A r{};
  A eps{};
  std::vector<PlayerData<F>> players;
  Matrix<A> cross;
};

/// Evaluates the ping-pong conditions at thresholds (r, eps) given in the
/// field's absolute-value type.
template <LocalField F>
PingPongReport<F> evaluate_pingpong(const F& field, std::vector<PlayerData<F>> players,
                                    const typename F::abs_type& r, const typename F::abs_type& eps) {
  using A = typename F::abs_type;
  PingPongReport<F> rep;
  rep.r = r;
  rep.eps = eps;
  const A eps2 = eps * eps;
  const std::size_t m = players.size();
  for (const auto& p : players) {
    for (std::size_t s = 0; s < 2; ++s) {
      if (!(p[s].ratio <= eps2)) rep.own_contraction_failed = true;
      if (!(p[s].separation > r)) rep.own_separation_failed = true;
    }
  }
  rep.cross = Matrix<A>(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t s = 0; s < 2; ++s) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t t = 0; t < 2; ++t) {
          A value = dist_point_hyperplane(field, players[i][s].v, players[j][t].h);
          rep.cross(2 * i + s, 2 * j + t) = value;
          if (i != j && !(value >= r)) rep.cross_margin_failed = true;
        }
      }
    }
  }
  rep.certified = !rep.own_contraction_failed && !rep.own_separation_failed && !rep.cross_margin_failed;
  rep.players = std::move(players);
  return rep;
}

template <LocalField F>
PingPongReport<F> is_pingpong_tuple(const F& field, const std::vector<Matrix<typename F::value_type>>& gs, double r,
                                    double eps) {
  detail::check_r_eps(r, eps);
  if (gs.size() < 2) throw UsageError("a ping-pong tuple needs at least two generators");
  std::vector<PlayerData<F>> players;
  for (const auto& g : gs) players.push_back(player_data(field, g));
  return evaluate_pingpong(field, std::move(players), field.threshold(r), field.threshold(eps));
}

// ---------------------------------------------------------------------------
// Certified real mode.  Generators are exact rationals; every comparison is
// decided on rigorous bounds (exact rational arithmetic, outward-rounded
// intervals for square roots).

struct CertifiedContraction {
  Vector<double> v;     // approximate attracting point
  Covector<double> h;   // approximate repelling covector
  double ratio_upper = 1;  // |a_2/a_1| <= ratio_upper
  double v_error = 1;      // delta(v, true v) <= v_error
  double h_error = 1;      // delta(Ker h, true H) <= h_error
  double separation_lower = 0;
  bool ratio_ok = false;  // ratio <= eps^2 proven
};

struct CertifiedPlayer {
  CertifiedContraction fwd;
  CertifiedContraction inv;

  const CertifiedContraction& operator[](std::size_t s) const { return s == 0 ? fwd : inv; }
};

struct CertifiedReport {
  bool certified = false;
  bool own_contraction_failed = false;
  bool own_separation_failed = false;
  bool cross_margin_failed = false;
  double r = 0;
  double eps = 0;
  std::vector<CertifiedPlayer> players;
  Matrix<double> cross_lower;  // rigorous lower bounds, same layout as PingPongReport::cross
};

CertifiedContraction certify_contraction(const Matrix<Rational>& g, double eps);
CertifiedReport certify_pingpong_real(const std::vector<Matrix<Rational>>& gs, double r, double eps);

// ---------------------------------------------------------------------------
// Exhaustive word oracle.  Letter i (lowercase 'a'+i) is generator i, the
// uppercase letter its inverse.

struct WordVerdict {
  bool relation_found = false;
  std::string word;  // shortest relation, lexicographically first among those
};

/// Searches all nonempty reduced words of length <= max_len (<= 16) for one
/// equal to the identity, using exact products.
WordVerdict free_word_oracle(const std::vector<Matrix<Rational>>& gs, int max_len);

/// All reduced relations of length <= max_len in (length, lexicographic)
/// order, at most `limit` of them.
std::vector<std::string> find_relations(const std::vector<Matrix<Rational>>& gs, int max_len,
                                        std::size_t limit = 1000);

Matrix<Rational> evaluate_word(const std::vector<Matrix<Rational>>& gs, const std::string& word);

/// True when no letter is followed by its inverse.
bool is_reduced(const std::string& word);

}  // namespace freewalk
