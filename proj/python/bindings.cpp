#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "freewalk/decomp.hpp"
#include "freewalk/experiment.hpp"
#include "freewalk/pingpong.hpp"
#include "freewalk/rng.hpp"
#include "freewalk/stats.hpp"
#include "freewalk/walk.hpp"

namespace py = pybind11;
using namespace freewalk;

namespace {

// Entries arrive as strings ("3", "-1/9", "0.25"); the Python side calls str().
using Rows = std::vector<std::vector<std::string>>;

Matrix<Rational> to_matrix(const Rows& rows) {
  if (rows.empty()) throw UsageError("empty matrix");
  Matrix<Rational> m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw UsageError("ragged matrix");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = parse_rational(rows[i][j]);
  }
  return m;
}

std::vector<Matrix<Rational>> to_matrices(const std::vector<Rows>& gs) {
  std::vector<Matrix<Rational>> out;
  for (const auto& g : gs) out.push_back(to_matrix(g));
  return out;
}

py::object entry(double x) { return py::float_(x); }
py::object entry(const Rational& x) { return py::str(format_rational(x)); }

template <class T>
py::list rows_of(const Matrix<T>& m) {
  py::list out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    py::list row;
    for (std::size_t j = 0; j < m.cols(); ++j) row.append(entry(m(i, j)));
    out.append(row);
  }
  return out;
}

template <class T>
py::list list_of(const std::vector<T>& xs) {
  py::list out;
  for (const auto& x : xs) out.append(entry(x));
  return out;
}

template <class K>
py::dict decomposition(const K& c, const char* last) {
  py::dict out;
  out["k"] = rows_of(c.k);
  out["a"] = list_of(c.a);
  if constexpr (requires { c.u; }) out[last] = rows_of(c.u);
  else out[last] = rows_of(c.n);
  return out;
}

py::dict kak_py(const Rows& rows, std::uint32_t p) {
  const auto g = to_matrix(rows);
  if (p == 0) return decomposition(kak(Reals{}, g.cast<double>()), "u");
  return decomposition(kak(PAdicField(p), g), "u");
}

py::dict iwasawa_py(const Rows& rows, std::uint32_t p) {
  const auto g = to_matrix(rows);
  if (p == 0) return decomposition(iwasawa(Reals{}, g.cast<double>()), "n");
  return decomposition(iwasawa(PAdicField(p), g), "n");
}

template <class Report>
py::dict verdict(const Report& r) {
  py::dict out;
  out["certified"] = r.certified;
  out["own_contraction_failed"] = r.own_contraction_failed;
  out["own_separation_failed"] = r.own_separation_failed;
  out["cross_margin_failed"] = r.cross_margin_failed;
  return out;
}

py::dict certify_py(const std::vector<Rows>& generators, double r, double eps, std::uint32_t p, bool exact) {
  const auto gs = to_matrices(generators);
  py::gil_scoped_release release;
  if (p != 0) {
    const PAdicField field(p);
    auto rep = is_pingpong_tuple(field, gs, r, eps);
    py::gil_scoped_acquire acquire;
    return verdict(rep);
  }
  if (exact) {
    auto rep = certify_pingpong_real(gs, r, eps);
    py::gil_scoped_acquire acquire;
    return verdict(rep);
  }
  std::vector<Matrix<double>> gd;
  for (const auto& g : gs) gd.push_back(g.cast<double>());
  auto rep = is_pingpong_tuple(Reals{}, gd, r, eps);
  py::gil_scoped_acquire acquire;
  return verdict(rep);
}

py::dict summary(const MeanSummary& s) {
  py::dict out;
  out["mean"] = s.mean;
  out["sd"] = s.sd;
  out["se"] = s.se;
  out["count"] = s.count;
  return out;
}

py::dict lyapunov_py(const std::vector<Rows>& atoms, const std::vector<std::string>& probs, std::size_t n,
                     std::size_t reps, std::uint64_t seed, std::uint32_t p, unsigned threads) {
  const auto as = to_matrices(atoms);
  std::vector<Rational> ps;
  for (const auto& x : probs) ps.push_back(parse_rational(x));
  LyapunovEstimate est;
  {
    py::gil_scoped_release release;
    if (p == 0) {
      std::vector<Matrix<double>> ad;
      for (const auto& a : as) ad.push_back(a.cast<double>());
      est = lyapunov_estimate(make_measure(Reals{}, std::move(ad), ps), n, reps, seed, threads);
    } else {
      est = lyapunov_estimate(make_measure(PAdicField(p), as, ps), n, reps, seed, threads);
    }
  }
  const auto gap = gap_test(est);
  py::dict out;
  out["lambda1"] = summary(est.lambda1);
  out["lambda12"] = summary(est.lambda12);
  out["gap"] = summary(est.gap);
  out["lambda1_x"] = summary(est.lambda1_x);
  out["gap_positive"] = gap.positive;
  out["gap_margin"] = gap.margin;
  out["sl2_ok"] = gap.sl2_ok;
  return out;
}

py::dict run_config_py(const std::filesystem::path& path, std::optional<unsigned> threads,
                       std::optional<std::string> out, std::optional<std::uint64_t> seed) {
  auto c = read_config(path);
  if (threads) c.threads = *threads;
  if (out) c.out = *out;
  if (seed) c.seed = *seed;
  std::ostringstream log;
  {
    py::gil_scoped_release release;
    run(c, log);
  }
  py::dict result;
  result["out"] = c.out;
  result["log"] = log.str();
  return result;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "freewalk: random walks on SL_d over R and Q_p, ping-pong certificates";
  m.attr("rng_name") = kRngName;

  m.def("kak", &kak_py, py::arg("matrix"), py::arg("p") = 0,
        "g = k diag(a) u; p = 0 for the reals, otherwise Q_p with exact entries as 'n/d' strings");
  m.def("iwasawa", &iwasawa_py, py::arg("matrix"), py::arg("p") = 0, "g = k diag(a) n, n upper unitriangular");
  m.def("certify", &certify_py, py::arg("generators"), py::arg("r"), py::arg("eps"), py::arg("p") = 0,
        py::arg("exact") = false);
  m.def(
      "free_word_oracle",
      [](const std::vector<Rows>& gs, int max_len) {
        const auto ms = to_matrices(gs);
        py::gil_scoped_release release;
        const auto v = free_word_oracle(ms, max_len);
        return std::pair{v.relation_found, v.word};
      },
      py::arg("generators"), py::arg("max_len"));
  m.def(
      "find_relations",
      [](const std::vector<Rows>& gs, int max_len, std::size_t limit) {
        const auto ms = to_matrices(gs);
        py::gil_scoped_release release;
        return find_relations(ms, max_len, limit);
      },
      py::arg("generators"), py::arg("max_len"), py::arg("limit") = 1000);
  m.def("lyapunov", &lyapunov_py, py::arg("atoms"), py::arg("probs"), py::arg("n"), py::arg("reps"),
        py::arg("seed"), py::arg("p") = 0, py::arg("threads") = 1);
  m.def("run_config", &run_config_py, py::arg("path"), py::arg("threads") = py::none(), py::arg("out") = py::none(),
        py::arg("seed") = py::none());
  m.def("philox4x32_10", &philox4x32_10, py::arg("counter"), py::arg("key"));
}
