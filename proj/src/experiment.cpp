#include "freewalk/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "freewalk/io.hpp"
#include "freewalk/multiprecision.hpp"
#include "freewalk/pingpong.hpp"
#include "freewalk/stats_mp.hpp"
#include "json_util.hpp"

namespace freewalk {

namespace {

using namespace jsonio;

const std::map<std::string, ExperimentKind> kKinds = {
    {"lyapunov", ExperimentKind::lyapunov},   {"decay", ExperimentKind::decay},
    {"direction", ExperimentKind::direction}, {"independence", ExperimentKind::independence},
    {"invariant", ExperimentKind::invariant}, {"tuple", ExperimentKind::tuple},
    {"trajectory", ExperimentKind::trajectory},
};

const std::set<std::string> kCommonKeys = {"schema", "experiment", "field", "measure", "seed", "threads", "out", "precision"};

const std::map<ExperimentKind, std::set<std::string>> kKeys = {
    {ExperimentKind::lyapunov, {"n", "reps", "moment_eps"}},
    {ExperimentKind::decay, {"measure2", "grid", "reps", "r_base", "eps_base"}},
    {ExperimentKind::direction, {"grid", "reps", "horizon", "x"}},
    {ExperimentKind::independence, {"grid", "reps", "phi1", "phi2"}},
    {ExperimentKind::invariant, {"n", "reps", "t", "x", "hyperplanes", "random_hyperplanes"}},
    {ExperimentKind::tuple, {"l", "n", "reps", "grid", "r_base", "eps_base"}},
    {ExperimentKind::trajectory, {"n"}},
};

const std::map<ExperimentKind, std::set<std::string>> kRequired = {
    {ExperimentKind::lyapunov, {"n", "reps"}},        {ExperimentKind::decay, {"grid", "reps"}},
    {ExperimentKind::direction, {"grid", "reps"}},    {ExperimentKind::independence, {"grid", "reps"}},
    {ExperimentKind::invariant, {"n", "reps"}},       {ExperimentKind::tuple, {"l", "n", "reps"}},
    {ExperimentKind::trajectory, {"n"}},
};

std::size_t size_of(const Ctx& ctx, const json& v, const std::string& key, std::size_t min = 1) {
  if (!v.is_number_unsigned() || v.get<std::size_t>() < min) {
    ctx.fail("/" + key, "expected an integer >= " + std::to_string(min));
  }
  return v.get<std::size_t>();
}

double real_of(const Ctx& ctx, const json& v, const std::string& key) {
  if (!v.is_number()) ctx.fail("/" + key, "expected a number");
  return v.get<double>();
}

std::string string_of(const Ctx& ctx, const json& v, const std::string& key) {
  if (!v.is_string()) ctx.fail("/" + key, "expected a string");
  return v.get<std::string>();
}

std::vector<Rational> coords_of(const Ctx& ctx, const json& v, const std::string& pointer) {
  if (!v.is_array() || v.empty()) ctx.fail(pointer, "expected a nonempty array of coordinates");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(scalar_of(ctx, v[i], pointer + "/" + std::to_string(i), FieldSpec::real()));
  }
  if (std::all_of(out.begin(), out.end(), [](const Rational& q) { return q == 0; })) {
    ctx.fail(pointer, "coordinates must not all vanish");
  }
  return out;
}

HolderTestFunction phi_of(const Ctx& ctx, const json& v, const std::string& key) {
  const std::string base = "/" + key;
  HolderTestFunction phi;
  if (!v.is_object()) ctx.fail(base, "expected {\"eps\": ..., \"factors\": [...]}");
  for (const auto& [k, _] : v.items()) {
    if (k != "eps" && k != "factors") ctx.fail(base + "/" + k, "unknown field");
  }
  if (auto it = v.find("eps"); it != v.end()) {
    if (!it->is_number()) ctx.fail(base + "/eps", "expected a number");
    phi.eps = it->get<double>();
    if (!(phi.eps > 0 && phi.eps <= 1)) ctx.fail(base + "/eps", "Hoelder exponent must lie in (0, 1]");
  }
  const auto& factors = member(ctx, v, base, "factors");
  if (!factors.is_array() || factors.empty()) ctx.fail(base + "/factors", "expected a nonempty array");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string fp = base + "/factors/" + std::to_string(i);
    const auto& kind = member(ctx, factors[i], fp, "kind");
    HolderFactor f;
    if (kind == "point") {
      f.kind = HolderFactor::Kind::point;
    } else if (kind == "hyperplane") {
      f.kind = HolderFactor::Kind::hyperplane;
    } else {
      ctx.fail(fp + "/kind", "expected \"point\" or \"hyperplane\"");
    }
    f.ref = coords_of(ctx, member(ctx, factors[i], fp, "ref"), fp + "/ref");
    phi.factors.push_back(std::move(f));
  }
  return phi;
}

HolderTestFunction basis_phi(std::size_t d, std::size_t index) {
  HolderFactor f;
  f.kind = HolderFactor::Kind::point;
  f.ref.assign(d, Rational(0));
  f.ref[index] = 1;
  return {{f}, 1.0};
}

// ---------------------------------------------------------------------------
// Output helpers.

template <class T>
json num(const T& x) {
  if constexpr (std::is_same_v<T, Rational>) {
    return format_rational(x);
  } else {
    return round_sig(to_double(x));
  }
}

json num(double x) { return round_sig(x); }

template <class T, class Tag>
json coords_json(const Coords<T, Tag>& x) {
  json out = json::array();
  for (const auto& e : x.entries()) out.push_back(num(e));
  return out;
}

template <class T>
json matrix_json(const Matrix<T>& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json rationals_json(const std::vector<Rational>& xs, bool exact) {
  json out = json::array();
  for (const auto& q : xs) out.push_back(exact ? json(format_rational(q)) : json(round_sig(q.get_d())));
  return out;
}

json phi_json(const HolderTestFunction& phi, const FieldSpec& field) {
  json factors = json::array();
  for (const auto& f : phi.factors) {
    factors.push_back({{"kind", f.kind == HolderFactor::Kind::point ? "point" : "hyperplane"},
                       {"ref", rationals_json(f.ref, true)}});
  }
  return {{"eps", num(phi.eps)},
          {"factors", factors},
          {"describe", phi.describe()},
          {"holder_norm_bound", num(phi.holder_norm_bound(field))}};
}

std::string fx(double x) { return format_fixed(x); }

json fit_json(const RateFit& fit) {
  return {{"ok", fit.ok},
          {"slope", num(fit.log_rho)},
          {"rho", num(fit.rho())},
          {"intercept", num(fit.intercept)},
          {"r2", num(fit.r2)},
          {"points", fit.points}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct Output {
  std::string csv;
  json sidecar = json::object();
  std::vector<std::pair<std::string, std::string>> extra;  // file name, content
};

// ---------------------------------------------------------------------------
// Typed experiment runners.

template <LocalField F>
WalkMeasure<F> to_walk(const F& field, const MeasureFile& mf) {
  using T = typename F::value_type;
  std::vector<Matrix<T>> atoms;
  for (std::size_t k = 0; k < mf.atoms.size(); ++k) {
    const auto& a = mf.atoms[k];
    Matrix<T> g(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) g(i, j) = field.from_rational(a(i, j));
    try {
      require_unimodular(field, g);
    } catch (const InvariantError& e) {
      throw InvariantError(mf.source + ": /atoms/" + std::to_string(k) + ": " + e.what());
    }
    atoms.push_back(std::move(g));
  }
  return make_measure(field, std::move(atoms), mf.probs);
}

template <LocalField F>
Vector<typename F::value_type> to_vector(const F& field, const std::vector<Rational>& xs) {
  std::vector<typename F::value_type> out;
  for (const auto& q : xs) out.push_back(field.from_rational(q));
  return Vector<typename F::value_type>(std::move(out));
}

template <LocalField F>
void run_lyapunov(const WalkMeasure<F>& m, const ExperimentConfig& c, Output& out) {
  const auto est = lyapunov_estimate(m, c.n, c.reps, *c.seed, c.threads);
  std::ostringstream csv;
  csv << "quantity,estimate,ci_lo,ci_hi,sd,n,reps\n";
  auto row = [&](const char* name, const MeanSummary& s) {
    const double hw = s.half_width();
    csv << name << ',' << fx(s.mean) << ',' << fx(s.mean - hw) << ',' << fx(s.mean + hw) << ',' << fx(s.sd) << ','
        << est.n << ',' << est.reps << '\n';
  };
  row("lambda1", est.lambda1);
  row("lambda1_plus_lambda2", est.lambda12);
  row("gap", est.gap);
  row("lambda1_x", est.lambda1_x);
  out.csv = csv.str();
  const auto verdict = gap_test(est);
  out.sidecar["gap_test"] = {{"positive", verdict.positive},
                             {"margin", num(verdict.margin)},
                             {"sl2_checked", verdict.sl2_checked},
                             {"sl2_ok", verdict.sl2_ok}};
  if (c.moment_eps) {
    out.sidecar["moment_ratio"] = {{"eps", num(*c.moment_eps)},
                                   {"value", num(moment_ratio(m, *c.moment_eps, c.n, c.reps, *c.seed, c.threads))}};
  }
}

template <LocalField F>
void run_decay(const WalkMeasure<F>& m, const WalkMeasure<F>& m2, const ExperimentConfig& c, Output& out) {
  const auto res = pingpong_decay(m, m2, c.r_base, c.eps_base, c.grid, c.reps, *c.seed, c.threads);
  std::ostringstream csv;
  csv << "n,p_hat,ci_lo,ci_hi,reps\n";
  json points = json::array();
  for (std::size_t k = 0; k < res.failure.points.size(); ++k) {
    const auto& p = res.failure.points[k];
    const auto& b = res.breakdown[k];
    csv << p.n << ',' << fx(p.value) << ',' << fx(p.ci_lo) << ',' << fx(p.ci_hi) << ',' << p.reps << '\n';
    const double nn = static_cast<double>(p.n);
    points.push_back({{"n", p.n},
                      {"r", num(std::pow(c.r_base, nn))},
                      {"eps", num(std::pow(c.eps_base, nn))},
                      {"valid", p.valid},
                      {"own_contraction_failures", b.own_contraction},
                      {"own_separation_failures", b.own_separation},
                      {"cross_margin_failures", b.cross_margin}});
  }
  out.csv = csv.str();
  const auto& pts = res.failure.points;
  out.sidecar["points"] = points;
  out.sidecar["fit"] = fit_json(res.failure.fit);
  out.sidecar["checks"] = {
      {"non_increasing_within_2x_wilson", non_increasing_within(pts, 2.0)},
      {"slope_negative", res.failure.fit.ok && res.failure.fit.log_rho < 0},
      {"last_over_first", pts.front().value > 0 ? json(num(pts.back().value / pts.front().value)) : json(nullptr)}};
}

void decay_rows(std::ostringstream& csv, const char* curve, const DecayEstimate& est) {
  for (const auto& p : est.points) {
    csv << curve << ',' << p.n << ',' << fx(p.value) << ',' << fx(p.ci_lo) << ',' << fx(p.ci_hi) << ',' << p.reps
        << '\n';
  }
}

json curve_json(const DecayEstimate& est) {
  return {{"fit", fit_json(est.fit)}, {"strictly_decreasing", strictly_decreasing(est.points)}};
}

template <LocalField F>
void run_direction(const WalkMeasure<F>& m, const ExperimentConfig& c, Output& out) {
  const auto x = to_vector(m.field, c.x);
  const auto dir = direction_convergence(m, x, c.grid, c.horizon, c.reps, *c.seed, c.threads);
  const auto frames = kak_convergence(m, c.grid, c.horizon, c.reps, *c.seed, c.threads);
  std::ostringstream csv;
  csv << "curve,n,mean,ci_lo,ci_hi,reps\n";
  decay_rows(csv, "direction", dir);
  decay_rows(csv, "kak_k_frame", frames.k_frame);
  decay_rows(csv, "kak_u_frame", frames.u_frame);
  out.csv = csv.str();
  out.sidecar["curves"] = {{"direction", curve_json(dir)},
                           {"kak_k_frame", curve_json(frames.k_frame)},
                           {"kak_u_frame", curve_json(frames.u_frame)}};
}

template <LocalField F>
void run_independence(const WalkMeasure<F>& m, const ExperimentConfig& c, Output& out) {
  std::ostringstream csv;
  csv << "n,discrepancy,se,mean1,mean2,mean12,reps\n";
  std::vector<IndependenceResult> rs;
  for (std::size_t n : c.grid) {
    rs.push_back(independence_test(m, c.phi1, c.phi2, n, c.reps, *c.seed, c.threads));
    const auto& r = rs.back();
    csv << r.n << ',' << fx(r.discrepancy) << ',' << fx(r.se) << ',' << fx(r.mean1) << ',' << fx(r.mean2) << ','
        << fx(r.mean12) << ',' << r.reps << '\n';
  }
  out.csv = csv.str();
  const FieldSpec spec = m.field.spec();
  out.sidecar["phi1"] = phi_json(c.phi1, spec);
  out.sidecar["phi2"] = phi_json(c.phi2, spec);
  out.sidecar["checks"] = {{"last_below_first", rs.back().discrepancy < rs.front().discrepancy}};
}

template <LocalField F>
void run_invariant(const WalkMeasure<F>& m, const ExperimentConfig& c, Output& out) {
  using T = typename F::value_type;
  const bool exact = F::exact;
  auto coords = c.hyperplanes;
  if (coords.empty()) coords = random_covector_coords(m.field.spec(), m.dim(), c.random_hyperplanes, *c.seed);
  std::vector<Covector<T>> hs;
  json hjson = json::array();
  for (const auto& f : coords) {
    if (f.size() != m.dim()) throw ConfigError("hyperplanes", "covector has the wrong dimension");
    std::vector<T> e;
    for (const auto& q : f) e.push_back(m.field.from_rational(q));
    hs.emplace_back(std::move(e));
    hjson.push_back(rationals_json(f, exact));
  }
  const auto probe =
      invariant_measure_probe(m, c.n, c.reps, hs, c.t, to_vector(m.field, c.x), *c.seed, c.threads);
  std::ostringstream csv;
  csv << "hyperplane,fraction,ci_lo,ci_hi,reps\n";
  for (std::size_t i = 0; i < probe.per_hyperplane.size(); ++i) {
    const auto& p = probe.per_hyperplane[i];
    csv << i << ',' << fx(p.p) << ',' << fx(p.lo) << ',' << fx(p.hi) << ',' << p.trials << '\n';
  }
  out.csv = csv.str();
  out.sidecar["hyperplanes"] = hjson;
  out.sidecar["threshold"] = num(probe.threshold);
  out.sidecar["sup"] = {{"index", probe.sup_index}, {"fraction", num(probe.sup_fraction)}};
}

template <LocalField F>
void run_tuple(const WalkMeasure<F>& m, const ExperimentConfig& c, Output& out) {
  const auto res = tuple_decay(m, c.l, c.r_base, c.eps_base, c.n, c.reps, *c.seed, c.threads);
  // the pair decay rate that feeds the union bound runs on disjoint streams
  const auto pair = pingpong_decay(m, m, c.r_base, c.eps_base, c.grid, c.reps, *c.seed, c.threads, 64);
  const auto& fit = pair.failure.fit;
  const double rho = fit.ok ? std::min(fit.rho(), 1.0) : 1.0;
  const double bound = union_bound(c.l, rho, c.n);
  std::ostringstream csv;
  csv << "l,n,p_hat,ci_lo,ci_hi,se,union_bound,reps\n";
  csv << res.l << ',' << res.n << ',' << fx(res.failure.p) << ',' << fx(res.failure.lo) << ',' << fx(res.failure.hi)
      << ',' << fx(res.se) << ',' << fx(bound) << ',' << res.failure.trials << '\n';
  out.csv = csv.str();
  json pair_points = json::array();
  for (const auto& p : pair.failure.points) {
    pair_points.push_back({{"n", p.n}, {"p_hat", num(p.value)}, {"ci_lo", num(p.ci_lo)}, {"ci_hi", num(p.ci_hi)},
                           {"valid", p.valid}});
  }
  out.sidecar["pair_decay"] = {{"grid_points", pair_points}, {"fit", fit_json(fit)}, {"rho_used", num(rho)}};
  out.sidecar["breakdown"] = {{"own_contraction_failures", res.breakdown.own_contraction},
                              {"own_separation_failures", res.breakdown.own_separation},
                              {"cross_margin_failures", res.breakdown.cross_margin}};
  out.sidecar["checks"] = {{"within_union_bound_plus_2se", res.failure.p <= bound + 2 * res.se}};
}

template <LocalField F>
void run_trajectory(const WalkMeasure<F>& m, const ExperimentConfig& c, Output& out) {
  WalkState<F> s(m.dim(), walk_stream(*c.seed, 0));
  std::ostringstream jsonl;
  for (std::size_t k = 1; k <= c.n; ++k) {
    advance(m, s);
    auto cd = contraction_data(m.field, s.right);
    json rec = {{"n", k},
                {"log_norm_M", num(log_norm(m.field, s.left.mat))},
                {"log_norm_S", num(log_norm(m.field, s.right.mat))},
                {"a_ratio", num(cd.ratio)},
                {"log_a_ratio", num(log_ratio(m.field, s.right))},
                {"v", coords_json(cd.v)},
                {"h", coords_json(cd.h)}};
    jsonl << rec.dump() << '\n';
  }
  out.extra.emplace_back("trajectory.jsonl", jsonl.str());
  out.sidecar["records"] = c.n;
  out.sidecar["stream"] = "walk_stream(seed, 0)";
}

template <LocalField F>
json probe_json(const WalkMeasure<F>& m, std::uint64_t seed, const std::string& name, std::ostream& log) {
  const auto probe = probe_proximality(m, seed);
  if (!probe.found) {
    log << "warning: " << name << ": no proximal element among " << probe.tried
        << " sampled products of length <= 12; contraction may fail for this measure\n";
  }
  json j = {{"found", probe.found}, {"tried", probe.tried}};
  if (probe.found) j["length"] = probe.length;
  return j;
}

template <LocalField F>
void run_typed(const F& field, const ExperimentConfig& c, const MeasureFile& mf, const MeasureFile& mf2,
               Output& out, std::ostream& log) {
  const auto m = to_walk(field, mf);
  const bool two = c.kind == ExperimentKind::decay;
  std::optional<WalkMeasure<F>> m2;
  if (two) m2 = to_walk(field, mf2);
  json probes = {{"measure", probe_json(m, *c.seed, "measure", log)}};
  if (two && !c.measure2.empty()) probes["measure2"] = probe_json(*m2, *c.seed, "measure2", log);
  out.sidecar["proximality_probe"] = probes;
  switch (c.kind) {
    case ExperimentKind::lyapunov: run_lyapunov(m, c, out); break;
    case ExperimentKind::decay: run_decay(m, *m2, c, out); break;
    case ExperimentKind::direction: run_direction(m, c, out); break;
    case ExperimentKind::independence: run_independence(m, c, out); break;
    case ExperimentKind::invariant: run_invariant(m, c, out); break;
    case ExperimentKind::tuple: run_tuple(m, c, out); break;
    case ExperimentKind::trajectory: run_trajectory(m, c, out); break;
  }
}

std::string default_precision(ExperimentKind kind) {
  return kind == ExperimentKind::direction ? "mp50" : "double";
}

json config_echo(const ExperimentConfig& c, const std::string& precision, const FieldSpec& field) {
  json j = {{"schema", kConfigSchema},
            {"experiment", to_string(c.kind)},
            {"field", field.to_string()},
            {"measure", c.measure},
            {"seed", *c.seed},
            {"precision", precision}};
  const bool exact = !field.is_archimedean();
  for (const auto& key : kKeys.at(c.kind)) {
    if (key == "measure2") j[key] = c.measure2.empty() ? c.measure : c.measure2;
    if (key == "grid") j[key] = c.grid;
    if (key == "reps") j[key] = c.reps;
    if (key == "n") j[key] = c.n;
    if (key == "horizon") j[key] = c.horizon;
    if (key == "l") j[key] = c.l;
    if (key == "r_base") j[key] = num(c.r_base);
    if (key == "eps_base") j[key] = num(c.eps_base);
    if (key == "t") j[key] = num(c.t);
    if (key == "moment_eps") j[key] = c.moment_eps ? json(num(*c.moment_eps)) : json(nullptr);
    if (key == "x") j[key] = rationals_json(c.x, exact);
    if (key == "phi1") j[key] = phi_json(c.phi1, field);
    if (key == "phi2") j[key] = phi_json(c.phi2, field);
    if (key == "hyperplanes" && !c.hyperplanes.empty()) {
      json hs = json::array();
      for (const auto& f : c.hyperplanes) hs.push_back(rationals_json(f, exact));
      j[key] = hs;
    }
    if (key == "random_hyperplanes" && c.hyperplanes.empty()) j[key] = c.random_hyperplanes;
  }
  return j;
}

}  // namespace

std::optional<ExperimentKind> experiment_from_string(const std::string& name) {
  auto it = kKinds.find(name);
  if (it == kKinds.end()) return std::nullopt;
  return it->second;
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : kKinds) {
    if (k == kind) return name;
  }
  return "?";
}

HolderTestFunction default_phi1(std::size_t d) { return basis_phi(d, 0); }
HolderTestFunction default_phi2(std::size_t d) { return basis_phi(d, d > 1 ? 1 : 0); }

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              std::optional<ExperimentKind> expected) {
  const Ctx ctx{source};
  const json root = parse_json(text, source);
  if (!root.is_object()) ctx.fail("", "expected a JSON object");
  const auto& schema = member(ctx, root, "", "schema");
  if (schema != kConfigSchema) ctx.fail("/schema", std::string("expected \"") + kConfigSchema + "\"");

  ExperimentConfig c;
  if (auto it = root.find("experiment"); it != root.end()) {
    auto kind = experiment_from_string(string_of(ctx, *it, "experiment"));
    if (!kind) ctx.fail("/experiment", "unknown experiment '" + it->get<std::string>() + "'");
    if (expected && *expected != *kind) {
      ctx.fail("/experiment", "config is for '" + to_string(*kind) + "', not '" + to_string(*expected) + "'");
    }
    c.kind = *kind;
  } else if (expected) {
    c.kind = *expected;
  } else {
    ctx.fail("/experiment", "missing field");
  }

  const auto& allowed = kKeys.at(c.kind);
  for (const auto& [key, _] : root.items()) {
    if (!kCommonKeys.count(key) && !allowed.count(key)) {
      bool known = std::any_of(kKeys.begin(), kKeys.end(), [&](const auto& kv) { return kv.second.count(key) > 0; });
      ctx.fail("/" + key, known ? "not used by experiment '" + to_string(c.kind) + "'" : "unknown field");
    }
  }
  for (const auto& key : kRequired.at(c.kind)) {
    if (!root.contains(key)) ctx.fail("/" + key, "missing field");
  }

  c.base_dir = std::filesystem::path(source).parent_path();
  c.measure = string_of(ctx, member(ctx, root, "", "measure"), "measure");
  for (const auto& [key, v] : root.items()) {
    if (key == "schema" || key == "experiment" || key == "measure") continue;
    if (key == "field") {
      c.field = field_of(ctx, v, "/field");
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) ctx.fail("/seed", "expected a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(size_of(ctx, v, key, 0));
    } else if (key == "out") {
      c.out = string_of(ctx, v, key);
    } else if (key == "precision") {
      c.precision = string_of(ctx, v, key);
      if (c.precision != "double" && c.precision != "mp50") ctx.fail("/precision", "expected \"double\" or \"mp50\"");
    } else if (key == "measure2") {
      c.measure2 = string_of(ctx, v, key);
    } else if (key == "grid") {
      if (!v.is_array()) ctx.fail("/grid", "expected an array of integers");
      for (std::size_t i = 0; i < v.size(); ++i) c.grid.push_back(size_of(ctx, v[i], "grid/" + std::to_string(i)));
      try {
        check_grid(c.grid);
      } catch (const std::exception& e) {
        ctx.fail("/grid", e.what());
      }
    } else if (key == "reps") {
      c.reps = size_of(ctx, v, key);
    } else if (key == "n") {
      c.n = size_of(ctx, v, key);
    } else if (key == "horizon") {
      c.horizon = size_of(ctx, v, key);
    } else if (key == "l") {
      c.l = size_of(ctx, v, key, 2);
    } else if (key == "r_base") {
      c.r_base = real_of(ctx, v, key);
    } else if (key == "eps_base") {
      c.eps_base = real_of(ctx, v, key);
    } else if (key == "t") {
      c.t = real_of(ctx, v, key);
      if (!(c.t > 0 && c.t < 1)) ctx.fail("/t", "expected a number in (0, 1)");
    } else if (key == "moment_eps") {
      c.moment_eps = real_of(ctx, v, key);
      if (!(*c.moment_eps > 0)) ctx.fail("/moment_eps", "expected a positive number");
    } else if (key == "x") {
      c.x = coords_of(ctx, v, "/x");
    } else if (key == "hyperplanes") {
      if (!v.is_array() || v.empty()) ctx.fail("/hyperplanes", "expected a nonempty array of covectors");
      for (std::size_t i = 0; i < v.size(); ++i) c.hyperplanes.push_back(coords_of(ctx, v[i], "/hyperplanes/" + std::to_string(i)));
    } else if (key == "random_hyperplanes") {
      c.random_hyperplanes = size_of(ctx, v, key);
    } else if (key == "phi1") {
      c.phi1 = phi_of(ctx, v, key);
    } else if (key == "phi2") {
      c.phi2 = phi_of(ctx, v, key);
    }
  }
  if (root.contains("hyperplanes") && root.contains("random_hyperplanes")) {
    ctx.fail("/random_hyperplanes", "give either hyperplanes or random_hyperplanes");
  }
  if (c.kind == ExperimentKind::direction && c.horizon != 0 && c.horizon < c.grid.back()) {
    ctx.fail("/horizon", "horizon must be >= max(grid)");
  }
  if (c.kind == ExperimentKind::tuple && c.grid.empty()) c.grid = {8, 16, 24, 32, 40};
  if (c.kind == ExperimentKind::direction && c.horizon == 0) c.horizon = 4 * c.grid.back();
  return c;
}

ExperimentConfig read_config(const std::filesystem::path& path, std::optional<ExperimentKind> expected) {
  return parse_config(read_text(path), path.string(), expected);
}

int run(const ExperimentConfig& config, std::ostream& log) {
  if (!config.seed) throw ConfigError("seed", "a seed is mandatory (config \"seed\", --seed or FREEWALK_SEED)");
  ExperimentConfig c = config;
  auto resolve = [&](const std::string& p) { return std::filesystem::path(p).is_absolute() ? std::filesystem::path(p) : c.base_dir / p; };
  const MeasureFile mf = read_measure_file(resolve(c.measure));
  const MeasureFile mf2 = c.measure2.empty() ? mf : read_measure_file(resolve(c.measure2));
  if (!(mf2.field == mf.field) || mf2.d != mf.d) {
    throw ConfigError("measure2", "measures must share field and dimension");
  }
  if (c.field && !(*c.field == mf.field)) {
    throw ConfigError("field", "config says " + c.field->to_string() + " but the measure is over " + mf.field.to_string());
  }
  const std::size_t d = mf.d;
  if (c.x.empty()) c.x.assign(d, Rational(1));
  if (c.x.size() != d) throw ConfigError("x", "expected " + std::to_string(d) + " coordinates");
  if (c.phi1.factors.empty()) c.phi1 = default_phi1(d);
  if (c.phi2.factors.empty()) c.phi2 = default_phi2(d);
  for (const auto* phi : {&c.phi1, &c.phi2}) {
    for (const auto& f : phi->factors) {
      if (f.ref.size() != d) throw ConfigError("phi", "test function reference has the wrong dimension");
    }
  }

  std::string precision;
  if (mf.field.is_archimedean()) {
    precision = c.precision.empty() ? default_precision(c.kind) : c.precision;
  } else {
    if (!c.precision.empty()) throw ConfigError("precision", "applies to real measures only");
    precision = "exact";
  }

  Output out;
  out.sidecar["schema"] = kResultSchema;
  out.sidecar["experiment"] = to_string(c.kind);
  out.sidecar["config"] = config_echo(c, precision, mf.field);
  out.sidecar["measure_hash"] = measure_hash(mf);
  if (c.kind == ExperimentKind::decay) out.sidecar["measure2_hash"] = measure_hash(mf2);
  out.sidecar["rng"] = kRngName;

  if (!mf.field.is_archimedean()) {
    run_typed(PAdicField(mf.field.prime), c, mf, mf2, out, log);
  } else if (precision == "mp50") {
    run_typed(Reals50{}, c, mf, mf2, out, log);
  } else {
    run_typed(Reals{}, c, mf, mf2, out, log);
  }

  const std::filesystem::path dir(c.out);
  const std::string stem = to_string(c.kind);
  if (!out.csv.empty()) write_text(dir / (stem + ".csv"), out.csv);
  for (const auto& [name, text] : out.extra) write_text(dir / name, text);
  write_text(dir / (stem + ".json"), dump(out.sidecar));
  return 0;
}

std::string kak_report(const std::filesystem::path& matrix_file) {
  const MatrixFile mf = read_matrix_file(matrix_file);
  json j = {{"schema", "freewalk.kak/1"}, {"field", mf.field.to_string()}, {"d", mf.d}};
  auto fill = [&](const auto& field, const auto& g) {
    const auto c = kak(field, g);
    json a = json::array();
    for (const auto& x : c.a) a.push_back(num(x));
    j["k"] = matrix_json(c.k);
    j["a"] = a;
    j["u"] = matrix_json(c.u);
    j["v"] = coords_json(c.v);
    j["h"] = coords_json(c.h);
    using A = typename std::decay_t<decltype(field)>::abs_type;
    const A ratio = field.abs(c.a[1]) / field.abs(c.a[0]);
    j["ratio"] = num(ratio);
  };
  if (mf.field.is_archimedean()) {
    fill(Reals{}, mf.matrix.cast<double>());
  } else {
    fill(PAdicField(mf.field.prime), mf.matrix);
  }
  return dump(j);
}

CertifyOutcome certify_report(const std::filesystem::path& generators_file, double r, double eps, bool exact) {
  const GeneratorsFile gf = read_generators_file(generators_file);
  detail::check_r_eps(r, eps);
  if (gf.generators.size() < 2) throw ConfigError(generators_file.string(), "need at least two generators");
  json j = {{"schema", kCertificateSchema},
            {"field", gf.field.to_string()},
            {"generators", gf.generators.size()},
            {"r", num(r)},
            {"eps", num(eps)}};
  bool certified = false;
  json players = json::array();
  json failures;
  json cross;
  auto fill = [&](const auto& field, const auto& rep) {
    for (const auto& p : rep.players) {
      json pj = json::object();
      for (std::size_t s = 0; s < 2; ++s) {
        pj[s == 0 ? "g" : "g_inv"] = {{"v", coords_json(p[s].v)},
                                      {"h", coords_json(p[s].h)},
                                      {"ratio", num(p[s].ratio)},
                                      {"separation", num(p[s].separation)}};
      }
      players.push_back(pj);
    }
    cross = matrix_json(rep.cross);
    (void)field;
  };
  if (!gf.field.is_archimedean()) {
    const PAdicField field(gf.field.prime);
    const auto rep = is_pingpong_tuple(field, gf.generators, r, eps);
    fill(field, rep);
    certified = rep.certified;
    failures = {{"own_contraction", rep.own_contraction_failed},
                {"own_separation", rep.own_separation_failed},
                {"cross_margin", rep.cross_margin_failed}};
    j["mode"] = "exact";
  } else if (exact) {
    const auto rep = certify_pingpong_real(gf.generators, r, eps);
    for (const auto& p : rep.players) {
      json pj = json::object();
      for (std::size_t s = 0; s < 2; ++s) {
        pj[s == 0 ? "g" : "g_inv"] = {{"v", coords_json(p[s].v)},
                                      {"h", coords_json(p[s].h)},
                                      {"ratio_upper", num(p[s].ratio_upper)},
                                      {"v_error", num(p[s].v_error)},
                                      {"h_error", num(p[s].h_error)},
                                      {"separation_lower", num(p[s].separation_lower)},
                                      {"ratio_ok", p[s].ratio_ok}};
      }
      players.push_back(pj);
    }
    cross = matrix_json(rep.cross_lower);
    certified = rep.certified;
    failures = {{"own_contraction", rep.own_contraction_failed},
                {"own_separation", rep.own_separation_failed},
                {"cross_margin", rep.cross_margin_failed}};
    j["mode"] = "certified";
  } else {
    std::vector<Matrix<double>> gs;
    for (const auto& g : gf.generators) gs.push_back(g.cast<double>());
    const auto rep = is_pingpong_tuple(Reals{}, gs, r, eps);
    fill(Reals{}, rep);
    certified = rep.certified;
    failures = {{"own_contraction", rep.own_contraction_failed},
                {"own_separation", rep.own_separation_failed},
                {"cross_margin", rep.cross_margin_failed}};
    j["mode"] = "double";
  }
  j["verdict"] = certified ? "certified_free" : "not_certified";
  j["players"] = players;
  j["cross"] = cross;
  j["failures"] = failures;
  j["note"] = certified ? "the generators form a ping-pong tuple, so they generate a free group"
                        : "the ping-pong test failed at these thresholds; this does not show the group is not free";
  return {certified, dump(j)};
}

int report_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return 2;
}

}  // namespace freewalk
