#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "freewalk/stats.hpp"

namespace freewalk {

MeanSummary summarize(const std::vector<double>& xs) {
  MeanSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  // shifted by the first value, so a constant sample gives its value and sd 0 exactly
  const double x0 = xs.front();
  double sum = 0;
  for (double x : xs) sum += x - x0;
  const double shift = sum / static_cast<double>(xs.size());
  s.mean = x0 + shift;
  if (xs.size() < 2) return s;
  double ss = 0;
  for (double x : xs) ss += (x - x0 - shift) * (x - x0 - shift);
  s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  s.se = s.sd / std::sqrt(static_cast<double>(xs.size()));
  return s;
}

Proportion wilson(std::size_t hits, std::size_t trials, double z) {
  Proportion out;
  out.hits = hits;
  out.trials = trials;
  if (trials == 0) {
    out.hi = 1;
    return out;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  out.p = p;
  out.lo = hits == 0 ? 0.0 : std::max(0.0, centre - half);
  out.hi = hits == trials ? 1.0 : std::min(1.0, centre + half);
  return out;
}

double log_mean_exp(const std::vector<double>& xs) {
  if (xs.empty()) throw UsageError("log_mean_exp of an empty sample");
  double top = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(top)) return top;
  double s = 0;
  for (double x : xs) s += std::exp(x - top);
  return top + std::log(s / static_cast<double>(xs.size()));
}

double RateFit::rho() const { return std::exp(log_rho); }

RateFit fit_decay(const std::vector<DecayPoint>& points, bool proportion) {
  std::vector<double> xs, ys, ws;
  for (const auto& p : points) {
    if (!p.valid || !(p.value > 0)) continue;
    if (proportion && !(p.value < 1)) continue;
    double width = p.ci_hi - p.ci_lo;
    if (!proportion) width /= p.value;
    xs.push_back(static_cast<double>(p.n));
    ys.push_back(std::log(p.value));
    ws.push_back(1.0 / std::max(width, 1e-12));
  }
  RateFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  double wsum = 0;
  for (double w : ws) wsum += w;
  for (double& w : ws) w /= wsum;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += ws[i] * xs[i];
    my += ws[i] * ys[i];
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    syy += ws[i] * (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0)) return fit;
  fit.ok = true;
  fit.log_rho = sxy / sxx;
  fit.intercept = my - fit.log_rho * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - fit.intercept - fit.log_rho * xs[i];
    ss_res += ws[i] * r * r;
  }
  fit.r2 = syy > 0 ? 1 - ss_res / syy : 1;
  return fit;
}

bool non_increasing_within(const std::vector<DecayPoint>& points, double slack) {
  const DecayPoint* prev = nullptr;
  for (const auto& p : points) {
    if (!p.valid) continue;
    if (prev) {
      double hw = 0.5 * (prev->ci_hi - prev->ci_lo) + 0.5 * (p.ci_hi - p.ci_lo);
      if (p.value > prev->value + slack * hw) return false;
    }
    prev = &p;
  }
  return true;
}

bool strictly_decreasing(const std::vector<DecayPoint>& points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].value < points[i - 1].value)) return false;
  }
  return true;
}

void check_grid(const std::vector<std::size_t>& grid) {
  if (grid.empty()) throw UsageError("grid is empty");
  if (grid.front() < 1) throw UsageError("grid values must be >= 1");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw UsageError("grid must be strictly increasing");
  }
}

double HolderTestFunction::holder_norm_bound(const FieldSpec& field) const {
  double lip = 0;
  for (const auto& f : factors) {
    lip += f.kind == HolderFactor::Kind::hyperplane && field.is_archimedean() ? std::sqrt(2.0) : 1.0;
  }
  return std::pow(lip, eps);
}

std::string HolderTestFunction::describe() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) os << " * ";
    os << (factors[i].kind == HolderFactor::Kind::point ? "delta(., [" : "delta(., Ker[");
    for (std::size_t j = 0; j < factors[i].ref.size(); ++j) {
      if (j) os << ',';
      os << format_rational(factors[i].ref[j]);
    }
    os << "])";
  }
  os << ")^" << format_fixed(eps);
  return os.str();
}

GapVerdict gap_test(const LyapunovEstimate& est, double z) {
  GapVerdict v;
  v.margin = est.gap.mean - est.gap.half_width(z);
  v.positive = v.margin > 0;
  if (est.dim == 2) {
    v.sl2_checked = true;
    v.sl2_ok = std::abs(est.lambda12.mean) <= est.lambda12.half_width(z);
  }
  return v;
}

std::vector<std::vector<Rational>> random_covector_coords(const FieldSpec& field, std::size_t d, std::size_t count,
                                                          std::uint64_t seed) {
  std::vector<std::vector<Rational>> out;
  for (std::size_t k = 0; k < count; ++k) {
    RngStream rng(seed, stream_id(StreamPurpose::hyperplanes, 0, static_cast<std::uint32_t>(k)));
    std::vector<Rational> f;
    do {
      f.clear();
      for (std::size_t i = 0; i < d; ++i) {
        if (field.is_archimedean()) {
          f.emplace_back(rng.normal());
        } else {
          const std::uint64_t span = 2 * static_cast<std::uint64_t>(field.prime) * field.prime * field.prime + 1;
          const long v = static_cast<long>(rng.next_u64() % span) - static_cast<long>(span / 2);
          f.emplace_back(v);
        }
      }
    } while (std::all_of(f.begin(), f.end(), [](const Rational& q) { return q == 0; }));
    out.push_back(std::move(f));
  }
  return out;
}

double union_bound(std::size_t l, double rho, std::size_t n) {
  return static_cast<double>(l) * static_cast<double>(l - 1) * std::pow(rho, static_cast<double>(n));
}

}  // namespace freewalk
