// freewalk: command-line front end.
//
//   freewalk kak <matrix.json>
//   freewalk certify <generators.json> --r R --eps E [--exact]
//   freewalk lyapunov|decay|direction|independence|invariant|tuple|trajectory <config.json>
//
// Global options --seed, --out, --threads (also FREEWALK_SEED, FREEWALK_OUT,
// FREEWALK_THREADS); a flag beats the environment, which beats the config.
// Exit codes: 0 success, 1 not certified, 2 bad input.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "freewalk/experiment.hpp"
#include "freewalk/io.hpp"

namespace fw = freewalk;

int main(int argc, char** argv) {
  CLI::App app{"Random matrix products over local fields"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  app.add_option("--seed", seed, "rng seed")->envname("FREEWALK_SEED");
  app.add_option("--out", out, "output directory")->envname("FREEWALK_OUT");
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->envname("FREEWALK_THREADS");

  std::string matrix_path;
  auto* kak = app.add_subcommand("kak", "KAK decomposition of one matrix");
  kak->add_option("matrix", matrix_path, "matrix JSON file")->required();

  std::string gens_path;
  double r = 0, eps = 0;
  bool exact = false;
  auto* certify = app.add_subcommand("certify", "ping-pong certificate for a generator tuple");
  certify->add_option("generators", gens_path, "generators JSON file")->required();
  certify->add_option("--r", r, "separation threshold")->required();
  certify->add_option("--eps", eps, "contraction threshold")->required();
  certify->add_flag("--exact", exact, "rigorous bounds for real generators");

  std::string config_path;
  std::vector<std::pair<CLI::App*, fw::ExperimentKind>> experiments;
  for (auto kind : {fw::ExperimentKind::lyapunov, fw::ExperimentKind::decay, fw::ExperimentKind::direction,
                    fw::ExperimentKind::independence, fw::ExperimentKind::invariant, fw::ExperimentKind::tuple,
                    fw::ExperimentKind::trajectory}) {
    auto* sub = app.add_subcommand(fw::to_string(kind), "run the " + fw::to_string(kind) + " experiment");
    sub->add_option("config", config_path, "experiment config JSON")->required();
    experiments.emplace_back(sub, kind);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*kak) {
      const std::string text = fw::kak_report(matrix_path);
      std::cout << text;
      if (out) fw::write_text(std::filesystem::path(*out) / "kak.json", text);
      return 0;
    }
    if (*certify) {
      const auto res = fw::certify_report(gens_path, r, eps, exact);
      std::cout << res.json;
      if (out) fw::write_text(std::filesystem::path(*out) / "certificate.json", res.json);
      return res.certified ? 0 : 1;
    }
    for (const auto& [sub, kind] : experiments) {
      if (!*sub) continue;
      auto config = fw::read_config(config_path, kind);
      if (seed) config.seed = *seed;
      if (out) config.out = *out;
      if (threads) config.threads = *threads;
      return fw::run(config, std::cerr);
    }
  } catch (const std::exception& e) {
    return fw::report_error(e, std::cerr);
  }
  return 2;
}
