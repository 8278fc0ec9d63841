#pragma once

// Monte Carlo estimators over seeded walks.  Every estimator runs its
// repetitions on pre-split rng streams, stores per-repetition results and
// reduces them in repetition order, so results do not depend on `threads`.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "freewalk/matrix.hpp"
#include "freewalk/walk.hpp"

namespace freewalk {

// ---------------------------------------------------------------------------
// Summaries.

inline constexpr double kZ95 = 1.959963984540054;

struct MeanSummary {
  double mean = 0;
  double sd = 0;  // sample standard deviation
  double se = 0;
  std::size_t count = 0;
  double half_width(double z = kZ95) const { return z * se; }
};

MeanSummary summarize(const std::vector<double>& xs);

struct Proportion {
  std::size_t hits = 0;
  std::size_t trials = 0;
  double p = 0;
  double lo = 0;  // Wilson interval
  double hi = 0;
};

Proportion wilson(std::size_t hits, std::size_t trials, double z = kZ95);

/// log(mean(exp(xs))) without overflow.
double log_mean_exp(const std::vector<double>& xs);

// ---------------------------------------------------------------------------
// Decay curves and their geometric fit.

struct DecayPoint {
  std::size_t n = 0;
  double value = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  std::size_t reps = 0;
  bool valid = true;  // false when the point's thresholds are degenerate
};

/// log value ~ intercept + n * log_rho by weighted least squares.
struct RateFit {
  bool ok = false;  // fewer than two usable points otherwise
  double log_rho = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t points = 0;
  double rho() const;
};

struct DecayEstimate {
  std::string quantity;
  bool proportion = false;  // Wilson intervals; otherwise normal intervals of a mean
  std::vector<DecayPoint> points;
  RateFit fit;
};

/// Uses valid points with value > 0 (and < 1 for proportions).  Weights are
/// inverse interval widths on the log scale (relative width for means,
/// absolute width for proportions), floored at 1e-12 and normalized.
RateFit fit_decay(const std::vector<DecayPoint>& points, bool proportion);

/// value[k+1] <= value[k] + slack * (hw[k] + hw[k+1]) for consecutive valid
/// points, hw being interval half widths.
bool non_increasing_within(const std::vector<DecayPoint>& points, double slack = 1.0);

/// value[k+1] < value[k] for all consecutive points.
bool strictly_decreasing(const std::vector<DecayPoint>& points);

void check_grid(const std::vector<std::size_t>& grid);

// ---------------------------------------------------------------------------
// Hoelder test functions from a fixed catalog: phi(x) = (prod_i f_i(x))^eps
// with f_i(x) = delta([x], [ref_i]) ("point") or delta([x], Ker ref_i)
// ("hyperplane", ref_i read in the dual space).  Each f_i is L-Lipschitz
// with L = 1 for points, sqrt(2) (real) or 1 (p-adic) for hyperplanes, and
// values lie in [0, 1], so ||phi||_eps <= (sum_i L_i)^eps.

struct HolderFactor {
  enum class Kind { point, hyperplane };
  Kind kind = Kind::point;
  std::vector<Rational> ref;
};

struct HolderTestFunction {
  std::vector<HolderFactor> factors;
  double eps = 1;

  double holder_norm_bound(const FieldSpec& field) const;
  std::string describe() const;
};

template <LocalField F, class Tag>
double evaluate_holder(const F& field, const HolderTestFunction& phi, const Coords<typename F::value_type, Tag>& x) {
  using T = typename F::value_type;
  double value = 1;
  for (const auto& f : phi.factors) {
    std::vector<T> ref;
    for (const auto& q : f.ref) ref.push_back(field.from_rational(q));
    if (ref.size() != x.size()) throw UsageError("test function reference has the wrong dimension");
    Vector<T> xv(x.entries());
    double factor;
    if (f.kind == HolderFactor::Kind::point) {
      factor = to_double(fubini_study(field, xv, Vector<T>(ref)));
    } else {
      factor = to_double(dist_point_hyperplane(field, xv, Covector<T>(ref)));
    }
    value *= factor;
  }
  return std::pow(value, phi.eps);
}

// ---------------------------------------------------------------------------
// Estimators.  All take `threads` (0 = hardware concurrency).

struct LyapunovEstimate {
  std::size_t dim = 0;
  std::size_t n = 0;
  std::size_t reps = 0;
  MeanSummary lambda1;     // (1/n) log ||S_n||
  MeanSummary lambda12;    // (1/n) log ||wedge^2 S_n||
  MeanSummary gap;         // per trajectory 2 l1 - l12
  MeanSummary lambda1_x;   // (1/n) log ||S_n x||, x = (1, ..., 1)
};

template <LocalField F>
LyapunovEstimate lyapunov_estimate(const WalkMeasure<F>& m, std::size_t n, std::size_t reps, std::uint64_t seed,
                                   unsigned threads = 1);

struct GapVerdict {
  bool positive = false;
  double margin = 0;        // gap - half width
  bool sl2_checked = false;  // d == 2
  bool sl2_ok = true;        // |lambda1 + lambda2| <= half width
};

GapVerdict gap_test(const LyapunovEstimate& est, double z = kZ95);

/// max over basis vectors x of (mean (||S_n|| / ||S_n x||)^eps)^(1/n).
template <LocalField F>
double moment_ratio(const WalkMeasure<F>& m, double eps, std::size_t n, std::size_t reps, std::uint64_t seed,
                    unsigned threads = 1);

/// Mean of delta(M_n[x], M_N[x]) for n in grid, N = horizon.
template <LocalField F>
DecayEstimate direction_convergence(const WalkMeasure<F>& m, const Vector<typename F::value_type>& x,
                                    const std::vector<std::size_t>& grid, std::size_t horizon, std::size_t reps,
                                    std::uint64_t seed, unsigned threads = 1);

struct InvariantProbe {
  std::size_t n = 0;
  double t = 0;
  double threshold = 0;  // t^n
  std::vector<Proportion> per_hyperplane;
  std::size_t sup_index = 0;
  double sup_fraction = 0;
};

/// Fraction of samples Z = M_n[x0] with delta(Z, Ker f) <= t^n, per f.
template <LocalField F>
InvariantProbe invariant_measure_probe(const WalkMeasure<F>& m, std::size_t n, std::size_t reps,
                                       const std::vector<Covector<typename F::value_type>>& hyperplanes, double t,
                                       const Vector<typename F::value_type>& x0, std::uint64_t seed,
                                       unsigned threads = 1);

/// Random covectors with standard normal (real) or uniform integer in
/// [-p^3, p^3] (p-adic) coordinates; stream purpose `hyperplanes`.
std::vector<std::vector<Rational>> random_covector_coords(const FieldSpec& field, std::size_t d, std::size_t count,
                                                          std::uint64_t seed);

struct KakConvergence {
  DecayEstimate k_frame;  // delta(k(M_n) e_1, k(M_N) e_1)
  DecayEstimate u_frame;  // delta(U_n^{-1} e_1^*, U_N^{-1} e_1^*), U from kak(S_n)
};

template <LocalField F>
KakConvergence kak_convergence(const WalkMeasure<F>& m, const std::vector<std::size_t>& grid, std::size_t horizon,
                               std::size_t reps, std::uint64_t seed, unsigned threads = 1);

struct IndependenceResult {
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean1 = 0;
  double mean2 = 0;
  double mean12 = 0;
  double discrepancy = 0;  // |mean12 - mean1 mean2|
  double se = 0;           // standard error of the covariance estimate
};

/// phi1 evaluated at K_n e_1 and phi2 at U_n^{-1} e_1^*, from kak(S_n).
template <LocalField F>
IndependenceResult independence_test(const WalkMeasure<F>& m, const HolderTestFunction& phi1,
                                     const HolderTestFunction& phi2, std::size_t n, std::size_t reps,
                                     std::uint64_t seed, unsigned threads = 1);

struct FailureBreakdown {
  std::size_t own_contraction = 0;
  std::size_t own_separation = 0;
  std::size_t cross_margin = 0;
};

struct PingPongDecay {
  DecayEstimate failure;
  std::vector<FailureBreakdown> breakdown;  // per grid point
};

/// Failure frequency of the ping-pong pair test on (S_n, S'_n) at r =
/// r_base^n, eps = eps_base^n.  Walk j of repetition k runs on stream
/// walk_stream(seed, k, slot_base + j); all grid points of a repetition are
/// checkpoints of the same pair of trajectories.
template <LocalField F>
PingPongDecay pingpong_decay(const WalkMeasure<F>& m, const WalkMeasure<F>& m2, double r_base, double eps_base,
                             const std::vector<std::size_t>& grid, std::size_t reps, std::uint64_t seed,
                             unsigned threads = 1, std::uint16_t slot_base = 0);

struct TupleDecay {
  std::size_t l = 0;
  std::size_t n = 0;
  Proportion failure;
  double se = 0;
  FailureBreakdown breakdown;
};

/// Failure frequency of the ping-pong l-tuple test on l independent walks
/// S_{n,1}, ..., S_{n,l} at r = r_base^n, eps = eps_base^n.  Streams as in
/// pingpong_decay, so l = 2 reproduces it exactly.
template <LocalField F>
TupleDecay tuple_decay(const WalkMeasure<F>& m, std::size_t l, double r_base, double eps_base, std::size_t n,
                       std::size_t reps, std::uint64_t seed, unsigned threads = 1, std::uint16_t slot_base = 0);

/// l (l-1) rho^n.
double union_bound(std::size_t l, double rho, std::size_t n);

// Explicit instantiations live in stats_*.cpp.
#define FREEWALK_STATS_DECLARE(EXTERN, F)                                                                              \
  EXTERN template LyapunovEstimate lyapunov_estimate<F>(const WalkMeasure<F>&, std::size_t, std::size_t,              \
                                                        std::uint64_t, unsigned);                                     \
  EXTERN template double moment_ratio<F>(const WalkMeasure<F>&, double, std::size_t, std::size_t, std::uint64_t,      \
                                         unsigned);                                                                   \
  EXTERN template DecayEstimate direction_convergence<F>(const WalkMeasure<F>&, const Vector<F::value_type>&,         \
                                                         const std::vector<std::size_t>&, std::size_t, std::size_t,   \
                                                         std::uint64_t, unsigned);                                    \
  EXTERN template InvariantProbe invariant_measure_probe<F>(const WalkMeasure<F>&, std::size_t, std::size_t,          \
                                                            const std::vector<Covector<F::value_type>>&, double,      \
                                                            const Vector<F::value_type>&, std::uint64_t, unsigned);   \
  EXTERN template KakConvergence kak_convergence<F>(const WalkMeasure<F>&, const std::vector<std::size_t>&,           \
                                                    std::size_t, std::size_t, std::uint64_t, unsigned);               \
  EXTERN template IndependenceResult independence_test<F>(const WalkMeasure<F>&, const HolderTestFunction&,           \
                                                          const HolderTestFunction&, std::size_t, std::size_t,        \
                                                          std::uint64_t, unsigned);                                   \
  EXTERN template PingPongDecay pingpong_decay<F>(const WalkMeasure<F>&, const WalkMeasure<F>&, double, double,       \
                                                  const std::vector<std::size_t>&, std::size_t, std::uint64_t,        \
                                                  unsigned, std::uint16_t);                                           \
  EXTERN template TupleDecay tuple_decay<F>(const WalkMeasure<F>&, std::size_t, double, double, std::size_t,          \
                                            std::size_t, std::uint64_t, unsigned, std::uint16_t);

FREEWALK_STATS_DECLARE(extern, Reals)
FREEWALK_STATS_DECLARE(extern, PAdicField)

}  // namespace freewalk
