#pragma once

// Finitely supported measures on SL_d and the left/right random walks
// M_n = X_1 ... X_n and S_n = X_n ... X_1 driven by one increment sequence.

#include <cstdint>
#include <optional>
#include <vector>

#include "freewalk/decomp.hpp"
#include "freewalk/parallel.hpp"
#include "freewalk/real_linalg.hpp"
#include "freewalk/rng.hpp"

namespace freewalk {

template <LocalField F>
struct WalkMeasure {
  using T = typename F::value_type;
  F field;
  std::vector<Factor<F>> atoms;
  std::vector<Factor<F>> inverses;
  std::vector<Rational> probs;
  /// thresholds[i] = floor((p_0 + ... + p_i) * 2^64); the last atom takes
  /// every draw above thresholds[size - 2].
  std::vector<std::uint64_t> thresholds;

  std::size_t dim() const { return atoms.front().g.rows(); }
  std::size_t size() const { return atoms.size(); }
};

/// Validates probabilities (positive, exact sum 1) and atoms (common d >= 2,
/// det 1); throws UsageError / InvariantError.
template <LocalField F>
WalkMeasure<F> make_measure(const F& field, std::vector<Matrix<typename F::value_type>> atoms,
                            std::vector<Rational> probs) {
  if (atoms.empty()) throw UsageError("measure has no atoms");
  if (atoms.size() != probs.size()) throw UsageError("measure: number of atoms and probabilities differ");
  Rational total(0);
  for (const auto& p : probs) {
    if (p <= 0) throw UsageError("measure: probabilities must be positive");
    total += p;
  }
  if (total != 1) throw UsageError("measure: probabilities sum to " + format_rational(total) + ", not 1");
  const std::size_t d = atoms.front().rows();
  WalkMeasure<F> m{field, {}, {}, std::move(probs), {}};
  for (auto& g : atoms) {
    if (g.rows() != d || g.cols() != d) throw UsageError("measure: atoms have different dimensions");
    require_unimodular(field, g);
    m.inverses.push_back(Factor<F>::of(inverse(g)));
    m.atoms.push_back(Factor<F>::of(std::move(g)));
  }
  Rational cum(0);
  for (std::size_t i = 0; i + 1 < m.probs.size(); ++i) {
    cum += m.probs[i];
    Integer scaled = (cum.get_num() << 64) / cum.get_den();
    static_assert(sizeof(unsigned long) == 8);
    m.thresholds.push_back(scaled.get_ui());
  }
  return m;
}

/// Index of the sampled atom; consumes exactly one 64-bit draw.
template <LocalField F>
std::size_t sample_index(const WalkMeasure<F>& m, RngStream& rng) {
  const std::uint64_t u = rng.next_u64();
  for (std::size_t i = 0; i < m.thresholds.size(); ++i) {
    if (u < m.thresholds[i]) return i;
  }
  return m.size() - 1;
}

template <LocalField F>
const Matrix<typename F::value_type>& sample_increment(const WalkMeasure<F>& m, RngStream& rng) {
  return m.atoms[sample_index(m, rng)].g;
}

struct WalkTracking {
  bool left = true;      // M_n
  bool right = true;     // S_n
  bool inverses = true;  // M_n^{-1}, S_n^{-1}
};

template <LocalField F>
struct WalkState {
  std::size_t step = 0;
  TrackedProduct<F> left;       // M_n = X_1 ... X_n
  TrackedProduct<F> right;      // S_n = X_n ... X_1
  TrackedProduct<F> left_inv;   // M_n^{-1} = X_n^{-1} ... X_1^{-1}
  TrackedProduct<F> right_inv;  // S_n^{-1} = X_1^{-1} ... X_n^{-1}
  RngStream rng;
  WalkTracking tracking;

  WalkState(std::size_t d, RngStream stream, WalkTracking what = {})
      : left(TrackedProduct<F>::identity(d)),
        right(TrackedProduct<F>::identity(d)),
        left_inv(TrackedProduct<F>::identity(d)),
        right_inv(TrackedProduct<F>::identity(d)),
        rng(stream),
        tracking(what) {}
};

/// One step: samples X and updates every tracked product with that same X.
template <LocalField F>
void advance(const WalkMeasure<F>& m, WalkState<F>& s) {
  const std::size_t i = sample_index(m, s.rng);
  const F& field = m.field;
  if (s.tracking.left) multiply_right(field, s.left, m.atoms[i]);
  if (s.tracking.right) multiply_left(field, s.right, m.atoms[i]);
  if (s.tracking.inverses) {
    if (s.tracking.left) multiply_left(field, s.left_inv, m.inverses[i]);
    if (s.tracking.right) multiply_right(field, s.right_inv, m.inverses[i]);
  }
  ++s.step;
}

template <LocalField F>
void advance(const WalkMeasure<F>& m, WalkState<F>& s, std::size_t steps) {
  for (std::size_t k = 0; k < steps; ++k) advance(m, s);
}

/// The stream of trajectory `index` of an experiment.
inline RngStream walk_stream(std::uint64_t seed, std::uint32_t index, std::uint16_t slot = 0) {
  return RngStream(seed, stream_id(StreamPurpose::walk, slot, index));
}

/// `count` trajectories of length n; trajectory i follows m for even i and
/// m2 for odd i, on stream walk_stream(seed, i), so it can be replayed alone.
template <LocalField F>
std::vector<WalkState<F>> run_independent_walks(const WalkMeasure<F>& m, const WalkMeasure<F>& m2, std::size_t count,
                                                std::size_t n, std::uint64_t seed, unsigned threads = 1) {
  if (count < 1) throw UsageError("run_independent_walks: count must be >= 1");
  if (m.dim() != m2.dim()) throw UsageError("run_independent_walks: measures act in different dimensions");
  std::vector<std::optional<WalkState<F>>> slots(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto& mu = i % 2 == 0 ? m : m2;
    WalkState<F> s(mu.dim(), walk_stream(seed, static_cast<std::uint32_t>(i)));
    advance(mu, s, n);
    slots[i].emplace(std::move(s));
  });
  std::vector<WalkState<F>> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Proximality heuristic.

/// Coefficients c_0..c_d of det(x - g), c_d = 1 (Faddeev-LeVerrier).
std::vector<Rational> characteristic_polynomial(const Matrix<Rational>& g);

/// True when g has a unique eigenvalue of maximal p-adic absolute value,
/// read off the last segment of the Newton polygon.
bool padic_proximal(const Matrix<Rational>& g, std::uint32_t p);

/// True when the two largest eigenvalue moduli differ by more than `rel_gap`
/// (relative).  Complex-conjugate pairs tie, as they should.
bool real_proximal(const Matrix<double>& g, double rel_gap = 1e-9);

struct ProximalityProbe {
  bool found = false;
  std::size_t length = 0;  // length of the first proximal product
  std::size_t tried = 0;
};

/// Samples up to `samples` products of length 1..max_len from the measure
/// and stops at the first one that is proximal.
template <LocalField F>
ProximalityProbe probe_proximality(const WalkMeasure<F>& m, std::uint64_t seed, std::size_t samples = 240,
                                   std::size_t max_len = 12) {
  using T = typename F::value_type;
  ProximalityProbe out;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t len = 1 + s % max_len;
    RngStream rng(seed, stream_id(StreamPurpose::proximality_probe, 0, static_cast<std::uint32_t>(s)));
    Matrix<T> g = Matrix<T>::identity(m.dim());
    for (std::size_t k = 0; k < len; ++k) {
      g = g * sample_increment(m, rng);
      if constexpr (!F::exact) g *= T(1) / max_abs_entry(m.field, g);
    }
    ++out.tried;
    bool proximal;
    if constexpr (F::exact) {
      proximal = padic_proximal(g, m.field.prime);
    } else {
      Matrix<double> gd(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) gd(i, j) = to_double(g(i, j));
      proximal = real_proximal(gd);
    }
    if (proximal) {
      out.found = true;
      out.length = len;
      return out;
    }
  }
  return out;
}

}  // namespace freewalk
