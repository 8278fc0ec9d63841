#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "freewalk/experiment.hpp"
#include "freewalk/io.hpp"

using namespace freewalk;
namespace fs = std::filesystem;

namespace {

const fs::path kData = FREEWALK_DATA_DIR;
const std::string kCli = FREEWALK_CLI_PATH;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("freewalk_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("data file parsing and diagnostics") {
  const auto m = parse_matrix_file(R"({"header": {"field": "real", "d": 2}, "matrix": [["1", "2"], [0, 1]]})", "m.json");
  CHECK(m.d == 2);
  CHECK(m.matrix(0, 1) == 2);
  const auto flat = parse_generators_file(
      R"({"field": {"kind": "nonarchimedean", "prime": 3}, "d": 2, "generators": [[["9", 0], [0, "1/9"]], [[1, 3], [0, 1]]]})",
      "g.json");
  CHECK(flat.field == FieldSpec::padic(3));
  CHECK(flat.generators[0](1, 1) == Rational(1, 9));

  CHECK(error_of([] { parse_matrix_file("{\n  \"d\": 2,\n  \"matrix\": [1,, 2]\n}", "bad.json"); }).starts_with("bad.json:3:"));
  CHECK(error_of([] {
          parse_matrix_file(R"({"field": "real", "d": 2, "matrix": [["1", "x"], [0, 1]]})", "m.json");
        }).starts_with("m.json: /matrix/0/1"));
  CHECK(error_of([] {
          parse_measure_file(R"({"field": "real", "d": 1, "atoms": [[["1"]]], "probs": ["1/2"]})", "p.json");
        }).find("/probs") != std::string::npos);
  CHECK(error_of([] {
          parse_matrix_file(R"({"field": {"kind": "padic", "prime": 4}, "d": 1, "matrix": [["1"]]})", "f.json");
        }).find("f.json") != std::string::npos);
  // floats are only accepted for real fields
  CHECK_THROWS_AS(parse_matrix_file(R"({"field": "Q_3", "d": 1, "matrix": [[0.5]]})", "f.json"), ConfigError);

  const auto mu = read_measure_file(kData / "measures/positive.json");
  CHECK(measure_hash(mu).starts_with("fnv1a64:"));
  CHECK(measure_hash(mu) == measure_hash(read_measure_file(kData / "measures/positive.json")));
  CHECK(measure_hash(mu) != measure_hash(read_measure_file(kData / "measures/diag2.json")));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(round_sig(0.1 + 0.2) == 0.3);
  CHECK(round_sig(123456789.123456789, 3) == 123000000.0);
}

TEST_CASE("config validation") {
  const auto c = read_config(kData / "configs/decay_positive.json", ExperimentKind::decay);
  CHECK(c.grid == std::vector<std::size_t>{8, 16, 24, 32, 40});
  CHECK(c.reps == 400);
  CHECK(c.seed == 20260101u);

  const std::string base = R"("schema": "freewalk.config/1", "measure": "m.json", "seed": 1)";
  CHECK(error_of([&] { parse_config("{" + base + R"(, "n": 10, "reps": 10, "grid": [1]})", "c.json", ExperimentKind::lyapunov); })
            .find("/grid") != std::string::npos);
  CHECK(error_of([&] { parse_config("{" + base + R"(, "n": 10, "reps": 10, "bogus": 1})", "c.json", ExperimentKind::lyapunov); })
            .find("/bogus") != std::string::npos);
  CHECK_THROWS_AS(parse_config("{" + base + R"(, "reps": 10})", "c.json", ExperimentKind::lyapunov), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema": "freewalk.config/1", "experiment": "decay", "measure": "m.json", "grid": [1], "reps": 2})",
                               "c.json", ExperimentKind::lyapunov),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("{" + base + R"(, "grid": [4, 2], "reps": 10})", "c.json", ExperimentKind::decay),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema": "freewalk.config/2", "measure": "m.json", "n": 10, "reps": 10})", "c.json",
                               ExperimentKind::lyapunov),
                  ConfigError);
}

TEST_CASE("experiments write deterministic artifacts") {
  auto c = read_config(kData / "configs/lyapunov_diag2.json", ExperimentKind::lyapunov);
  c.out = scratch("lyap").string();
  std::ostringstream log;
  CHECK(run(c, log) == 0);
  const std::string csv = read_text(fs::path(c.out) / "lyapunov.csv");
  CHECK(csv.find("lambda1,0.69314718056,") != std::string::npos);
  const std::string sidecar = read_text(fs::path(c.out) / "lyapunov.json");
  CHECK(sidecar.find("\"measure_hash\"") != std::string::npos);
  CHECK(sidecar.find("philox4x32-10/v1") != std::string::npos);

  c.threads = 3;
  c.out = scratch("lyap3").string();
  CHECK(run(c, log) == 0);
  CHECK(read_text(fs::path(c.out) / "lyapunov.csv") == csv);
  CHECK(read_text(fs::path(c.out) / "lyapunov.json") == sidecar);

  auto missing = c;
  missing.seed.reset();
  CHECK_THROWS(run(missing, log));
}

TEST_CASE("command-line exit codes") {
  const fs::path out = scratch("cli");
  const std::string gens = (kData / "generators").string();
  CHECK(run_cli("kak " + (kData / "matrices/upper.json").string() + " --out " + out.string()) == 0);
  CHECK(read_text(out / "kak.json").find("0.171572875254") != std::string::npos);
  CHECK(run_cli("certify " + gens + "/diag_conjugate.json --r 0.5 --eps 0.02") == 0);
  CHECK(run_cli("certify " + gens + "/diag_conjugate.json --r 0.5 --eps 0.02 --exact") == 0);
  CHECK(run_cli("certify " + gens + "/diag_conjugate_q3.json --r 0.5 --eps 0.2") == 0);
  CHECK(run_cli("certify " + gens + "/identity_pair.json --r 0.5 --eps 0.02") == 1);
  CHECK(run_cli("certify " + gens + "/non_free.json --r 0.5 --eps 0.02") == 1);
  CHECK(run_cli("certify " + gens + "/diag_conjugate.json --r 0.03 --eps 0.02") == 2);
  CHECK(run_cli("certify " + gens + "/missing.json --r 0.5 --eps 0.02") == 2);
  CHECK(run_cli("lyapunov") == 2);
  CHECK(run_cli("frobnicate x") == 2);

  // non-unimodular atom
  const fs::path bad = out / "bad_measure.json";
  write_text(bad, R"({"field": "real", "d": 2, "atoms": [[[2, 0], [0, 1]]], "probs": ["1"]})");
  write_text(out / "bad_config.json", R"({"schema": "freewalk.config/1", "measure": "bad_measure.json", "n": 10, "reps": 10, "seed": 1})");
  CHECK(run_cli("lyapunov " + (out / "bad_config.json").string() + " --out " + (out / "x").string()) == 2);
}

TEST_CASE("flag beats environment beats config") {
  const std::string cfg = (kData / "configs/lyapunov_positive.json").string();
  const fs::path a = scratch("prec_a"), b = scratch("prec_b"), c = scratch("prec_c");
  // small override run: the config's own seed, then env, then flag over env
  REQUIRE(run_cli("lyapunov " + cfg + " --out " + a.string()) == 0);
  REQUIRE(run_cli("lyapunov " + cfg + " --out " + b.string(), "FREEWALK_SEED=7") == 0);
  REQUIRE(run_cli("lyapunov " + cfg + " --out " + c.string() + " --seed 7", "FREEWALK_SEED=8") == 0);
  CHECK(read_text(a / "lyapunov.csv") != read_text(b / "lyapunov.csv"));
  CHECK(read_text(b / "lyapunov.csv") == read_text(c / "lyapunov.csv"));
  REQUIRE(run_cli("lyapunov " + cfg, "FREEWALK_OUT=" + (c / "env").string() + " FREEWALK_THREADS=2") == 0);
  CHECK(read_text(c / "env" / "lyapunov.json") == read_text(a / "lyapunov.json"));
}
