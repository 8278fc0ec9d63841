#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "freewalk/pingpong.hpp"
#include "freewalk/stats.hpp"

namespace freewalk {

namespace detail {

template <LocalField F>
typename F::abs_type power_threshold(const F& field, double base, std::size_t n) {
  using A = typename F::abs_type;
  A b = field.threshold(base);
  A out(1);
  for (std::size_t i = 0; i < n; ++i) out *= b;
  return out;
}

inline DecayPoint mean_point(std::size_t n, const std::vector<double>& xs) {
  MeanSummary s = summarize(xs);
  double hw = s.half_width();
  return {n, s.mean, s.mean - hw, s.mean + hw, xs.size(), true};
}

inline DecayPoint proportion_point(std::size_t n, std::size_t hits, std::size_t trials) {
  Proportion p = wilson(hits, trials);
  return {n, p.p, p.lo, p.hi, trials, true};
}

inline void check_horizon(const std::vector<std::size_t>& grid, std::size_t horizon) {
  check_grid(grid);
  if (horizon < 2 * grid.back()) {
    throw UsageError("horizon " + std::to_string(horizon) + " must be at least twice the largest grid value " +
                     std::to_string(grid.back()));
  }
}

inline void check_bases(double r_base, double eps_base) {
  if (!(0 < eps_base && eps_base < r_base && r_base < 1)) {
    throw DomainError("need 0 < eps_base < r_base < 1, got r_base=" + format_real(r_base) +
                      " eps_base=" + format_real(eps_base));
  }
}

inline void check_reps(std::size_t reps) {
  if (reps < 2) throw UsageError("reps must be >= 2");
}

template <LocalField F>
Vector<typename F::value_type> ones(std::size_t d) {
  return Vector<typename F::value_type>(d, typename F::value_type(1));
}

// Players (S_n, S_n^{-1}) for the ping-pong test.
template <LocalField F>
PlayerData<F> walk_player(const F& field, const WalkState<F>& s) {
  return {contraction_data(field, s.right), contraction_data(field, s.right_inv)};
}

}  // namespace detail

template <LocalField F>
LyapunovEstimate lyapunov_estimate(const WalkMeasure<F>& m, std::size_t n, std::size_t reps, std::uint64_t seed,
                                   unsigned threads) {
  if (n < 1) throw UsageError("lyapunov_estimate: n must be >= 1");
  detail::check_reps(reps);
  const F& field = m.field;
  const std::size_t d = m.dim();
  std::vector<double> l1(reps), l12(reps), gap(reps), l1x(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    WalkState<F> s(d, walk_stream(seed, static_cast<std::uint32_t>(r)), {false, true, false});
    advance(m, s, n);
    const double dn = static_cast<double>(n);
    l1[r] = log_norm(field, s.right.mat) / dn;
    l12[r] = log_norm(field, s.right.wedge) / dn;
    gap[r] = 2 * l1[r] - l12[r];
    l1x[r] = log_norm_applied(field, s.right.mat, detail::ones<F>(d)) / dn;
  });
  LyapunovEstimate est;
  est.dim = d;
  est.n = n;
  est.reps = reps;
  est.lambda1 = summarize(l1);
  est.lambda12 = summarize(l12);
  est.gap = summarize(gap);
  est.lambda1_x = summarize(l1x);
  return est;
}

template <LocalField F>
double moment_ratio(const WalkMeasure<F>& m, double eps, std::size_t n, std::size_t reps, std::uint64_t seed,
                    unsigned threads) {
  if (!(eps > 0 && eps <= 1)) throw DomainError("moment_ratio: eps must lie in (0, 1]");
  if (n < 1) throw UsageError("moment_ratio: n must be >= 1");
  detail::check_reps(reps);
  const F& field = m.field;
  const std::size_t d = m.dim();
  // logs[j][r] = eps * log(||S_n|| / ||S_n e_j||)
  std::vector<std::vector<double>> logs(d, std::vector<double>(reps));
  parallel_for(reps, threads, [&](std::size_t r) {
    WalkState<F> s(d, walk_stream(seed, static_cast<std::uint32_t>(r)), {false, true, false});
    advance(m, s, n);
    const double total = log_norm(field, s.right.mat);
    for (std::size_t j = 0; j < d; ++j) {
      auto e = Vector<typename F::value_type>::basis(d, j);
      logs[j][r] = eps * (total - log_norm_applied(field, s.right.mat, e));
    }
  });
  double best = -HUGE_VAL;
  for (std::size_t j = 0; j < d; ++j) best = std::max(best, log_mean_exp(logs[j]));
  return std::exp(best / static_cast<double>(n));
}

template <LocalField F>
DecayEstimate direction_convergence(const WalkMeasure<F>& m, const Vector<typename F::value_type>& x,
                                    const std::vector<std::size_t>& grid, std::size_t horizon, std::size_t reps,
                                    std::uint64_t seed, unsigned threads) {
  detail::check_horizon(grid, horizon);
  detail::check_reps(reps);
  const F& field = m.field;
  const std::size_t d = m.dim();
  if (x.size() != d || x.is_zero()) throw UsageError("direction_convergence: x must be a nonzero vector of size d");
  std::vector<std::vector<double>> dist(grid.size(), std::vector<double>(reps));
  parallel_for(reps, threads, [&](std::size_t r) {
    WalkState<F> s(d, walk_stream(seed, static_cast<std::uint32_t>(r)), {true, false, false});
    std::vector<Vector<typename F::value_type>> checkpoints;
    for (std::size_t g : grid) {
      advance(m, s, g - s.step);
      checkpoints.push_back(s.left.mat.unit * x);
    }
    advance(m, s, horizon - s.step);
    const auto limit = s.left.mat.unit * x;
    for (std::size_t k = 0; k < grid.size(); ++k) dist[k][r] = to_double(fubini_study(field, checkpoints[k], limit));
  });
  DecayEstimate est;
  est.quantity = "direction";
  for (std::size_t k = 0; k < grid.size(); ++k) est.points.push_back(detail::mean_point(grid[k], dist[k]));
  est.fit = fit_decay(est.points, false);
  return est;
}

template <LocalField F>
InvariantProbe invariant_measure_probe(const WalkMeasure<F>& m, std::size_t n, std::size_t reps,
                                       const std::vector<Covector<typename F::value_type>>& hyperplanes, double t,
                                       const Vector<typename F::value_type>& x0, std::uint64_t seed,
                                       unsigned threads) {
  if (!(t > 0 && t < 1)) throw DomainError("invariant_measure_probe: t must lie in (0, 1)");
  if (hyperplanes.empty()) throw UsageError("invariant_measure_probe: no hyperplanes given");
  detail::check_reps(reps);
  const F& field = m.field;
  const std::size_t d = m.dim();
  if (x0.size() != d || x0.is_zero()) throw UsageError("invariant_measure_probe: x0 must be a nonzero vector of size d");
  for (const auto& f : hyperplanes) {
    if (f.size() != d || f.is_zero()) throw UsageError("invariant_measure_probe: hyperplanes must be nonzero covectors");
  }
  const auto threshold = detail::power_threshold(field, t, n);
  std::vector<std::vector<char>> hit(reps, std::vector<char>(hyperplanes.size()));
  parallel_for(reps, threads, [&](std::size_t r) {
    WalkState<F> s(d, walk_stream(seed, static_cast<std::uint32_t>(r)), {true, false, false});
    advance(m, s, n);
    const auto z = s.left.mat.unit * x0;
    for (std::size_t h = 0; h < hyperplanes.size(); ++h) {
      hit[r][h] = dist_point_hyperplane(field, z, hyperplanes[h]) <= threshold;
    }
  });
  InvariantProbe out;
  out.n = n;
  out.t = t;
  out.threshold = to_double(threshold);
  for (std::size_t h = 0; h < hyperplanes.size(); ++h) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < reps; ++r) count += hit[r][h] ? 1 : 0;
    out.per_hyperplane.push_back(wilson(count, reps));
    if (h == 0 || out.per_hyperplane[h].p > out.sup_fraction) {
      out.sup_fraction = out.per_hyperplane[h].p;
      out.sup_index = h;
    }
  }
  return out;
}

template <LocalField F>
KakConvergence kak_convergence(const WalkMeasure<F>& m, const std::vector<std::size_t>& grid, std::size_t horizon,
                               std::size_t reps, std::uint64_t seed, unsigned threads) {
  using T = typename F::value_type;
  detail::check_horizon(grid, horizon);
  detail::check_reps(reps);
  const F& field = m.field;
  const std::size_t d = m.dim();
  std::vector<std::vector<double>> dk(grid.size(), std::vector<double>(reps));
  std::vector<std::vector<double>> du(grid.size(), std::vector<double>(reps));
  parallel_for(reps, threads, [&](std::size_t r) {
    WalkState<F> s(d, walk_stream(seed, static_cast<std::uint32_t>(r)), {true, true, false});
    std::vector<Vector<T>> ks, us;
    auto frames = [&] {
      ks.push_back(kak_general(field, s.left.mat.unit).v);
      us.push_back(Vector<T>(kak_general(field, s.right.mat.unit).h.entries()));
    };
    for (std::size_t g : grid) {
      advance(m, s, g - s.step);
      frames();
    }
    advance(m, s, horizon - s.step);
    frames();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      dk[k][r] = to_double(fubini_study(field, ks[k], ks.back()));
      du[k][r] = to_double(fubini_study(field, us[k], us.back()));
    }
  });
  KakConvergence out;
  out.k_frame.quantity = "kak_k_frame";
  out.u_frame.quantity = "kak_u_frame";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.k_frame.points.push_back(detail::mean_point(grid[k], dk[k]));
    out.u_frame.points.push_back(detail::mean_point(grid[k], du[k]));
  }
  out.k_frame.fit = fit_decay(out.k_frame.points, false);
  out.u_frame.fit = fit_decay(out.u_frame.points, false);
  return out;
}

template <LocalField F>
IndependenceResult independence_test(const WalkMeasure<F>& m, const HolderTestFunction& phi1,
                                     const HolderTestFunction& phi2, std::size_t n, std::size_t reps,
                                     std::uint64_t seed, unsigned threads) {
  if (n < 1) throw UsageError("independence_test: n must be >= 1");
  detail::check_reps(reps);
  const F& field = m.field;
  const std::size_t d = m.dim();
  std::vector<double> a(reps), b(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    WalkState<F> s(d, walk_stream(seed, static_cast<std::uint32_t>(r)), {false, true, false});
    advance(m, s, n);
    auto c = kak_general(field, s.right.mat.unit);
    a[r] = evaluate_holder(field, phi1, c.v);
    b[r] = evaluate_holder(field, phi2, c.h);
  });
  IndependenceResult out;
  out.n = n;
  out.reps = reps;
  const double dr = static_cast<double>(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    out.mean1 += a[r];
    out.mean2 += b[r];
    out.mean12 += a[r] * b[r];
  }
  out.mean1 /= dr;
  out.mean2 /= dr;
  out.mean12 /= dr;
  out.discrepancy = std::abs(out.mean12 - out.mean1 * out.mean2);
  std::vector<double> centred(reps);
  for (std::size_t r = 0; r < reps; ++r) centred[r] = (a[r] - out.mean1) * (b[r] - out.mean2);
  out.se = summarize(centred).se;
  return out;
}

template <LocalField F>
PingPongDecay pingpong_decay(const WalkMeasure<F>& m, const WalkMeasure<F>& m2, double r_base, double eps_base,
                             const std::vector<std::size_t>& grid, std::size_t reps, std::uint64_t seed,
                             unsigned threads, std::uint16_t slot_base) {
  detail::check_bases(r_base, eps_base);
  check_grid(grid);
  detail::check_reps(reps);
  if (m.dim() != m2.dim()) throw UsageError("pingpong_decay: measures act in different dimensions");
  const F& field = m.field;
  const std::size_t d = m.dim();
  struct Flags {
    bool fail, oc, os, cm;
  };
  std::vector<std::vector<Flags>> flags(grid.size(), std::vector<Flags>(reps));
  std::vector<typename F::abs_type> rs, es;
  std::vector<bool> valid;
  for (std::size_t g : grid) {
    rs.push_back(detail::power_threshold(field, r_base, g));
    es.push_back(detail::power_threshold(field, eps_base, g));
    valid.push_back(rs.back() > 2 * es.back());
  }
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    WalkState<F> s1(d, walk_stream(seed, rep, slot_base), {false, true, true});
    WalkState<F> s2(d, walk_stream(seed, rep, static_cast<std::uint16_t>(slot_base + 1)), {false, true, true});
    for (std::size_t k = 0; k < grid.size(); ++k) {
      advance(m, s1, grid[k] - s1.step);
      advance(m2, s2, grid[k] - s2.step);
      auto report = evaluate_pingpong(field, {detail::walk_player(field, s1), detail::walk_player(field, s2)}, rs[k],
                                      es[k]);
      flags[k][r] = {!report.certified, report.own_contraction_failed, report.own_separation_failed,
                     report.cross_margin_failed};
    }
  });
  PingPongDecay out;
  out.failure.quantity = "pingpong_failure";
  out.failure.proportion = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::size_t fails = 0;
    FailureBreakdown b;
    for (const auto& f : flags[k]) {
      fails += f.fail;
      b.own_contraction += f.oc;
      b.own_separation += f.os;
      b.cross_margin += f.cm;
    }
    auto point = detail::proportion_point(grid[k], fails, reps);
    point.valid = valid[k];
    out.failure.points.push_back(point);
    out.breakdown.push_back(b);
  }
  out.failure.fit = fit_decay(out.failure.points, true);
  return out;
}

template <LocalField F>
TupleDecay tuple_decay(const WalkMeasure<F>& m, std::size_t l, double r_base, double eps_base, std::size_t n,
                       std::size_t reps, std::uint64_t seed, unsigned threads, std::uint16_t slot_base) {
  detail::check_bases(r_base, eps_base);
  if (l < 2) throw UsageError("tuple_decay: l must be >= 2");
  if (n < 1) throw UsageError("tuple_decay: n must be >= 1");
  detail::check_reps(reps);
  const F& field = m.field;
  const std::size_t d = m.dim();
  const auto rr = detail::power_threshold(field, r_base, n);
  const auto ee = detail::power_threshold(field, eps_base, n);
  struct Flags {
    bool fail, oc, os, cm;
  };
  std::vector<Flags> flags(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    std::vector<PlayerData<F>> players;
    for (std::size_t j = 0; j < l; ++j) {
      WalkState<F> s(d, walk_stream(seed, static_cast<std::uint32_t>(r), static_cast<std::uint16_t>(slot_base + j)),
                     {false, true, true});
      advance(m, s, n);
      players.push_back(detail::walk_player(field, s));
    }
    auto report = evaluate_pingpong(field, std::move(players), rr, ee);
    flags[r] = {!report.certified, report.own_contraction_failed, report.own_separation_failed,
                report.cross_margin_failed};
  });
  TupleDecay out;
  out.l = l;
  out.n = n;
  std::size_t fails = 0;
  for (const auto& f : flags) {
    fails += f.fail;
    out.breakdown.own_contraction += f.oc;
    out.breakdown.own_separation += f.os;
    out.breakdown.cross_margin += f.cm;
  }
  out.failure = wilson(fails, reps);
  out.se = std::sqrt(out.failure.p * (1 - out.failure.p) / static_cast<double>(reps));
  return out;
}

}  // namespace freewalk
