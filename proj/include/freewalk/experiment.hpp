#pragma once

// Batch experiments: config ingestion, dispatch on field and precision, and
// deterministic CSV + JSON sidecar output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "freewalk/stats.hpp"

namespace freewalk {

inline constexpr const char* kConfigSchema = "freewalk.config/1";
inline constexpr const char* kResultSchema = "freewalk.result/1";
inline constexpr const char* kCertificateSchema = "freewalk.certificate/1";

enum class ExperimentKind { lyapunov, decay, direction, independence, invariant, tuple, trajectory };

std::optional<ExperimentKind> experiment_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

/// Resolved configuration.  Paths are relative to the config file's
/// directory (base_dir) unless absolute.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::lyapunov;
  std::filesystem::path base_dir;
  std::optional<FieldSpec> field;  // must match the measure when given
  std::string measure;
  std::string measure2;  // empty: same as measure
  std::vector<std::size_t> grid;
  std::size_t reps = 0;
  std::size_t n = 0;
  std::size_t horizon = 0;  // 0: 4 * max(grid)
  std::size_t l = 0;
  double r_base = 0.95;
  double eps_base = 0.9;
  double t = 0.5;
  std::optional<double> moment_eps;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out = "results";
  std::string precision;  // "double" | "mp50"; empty: experiment default
  std::vector<Rational> x;                     // empty: (1, ..., 1)
  std::vector<std::vector<Rational>> hyperplanes;
  std::size_t random_hyperplanes = 16;
  HolderTestFunction phi1;
  HolderTestFunction phi2;
};

/// Parses a "freewalk.config/1" document.  Unknown keys and keys the
/// experiment does not use are errors.  `expected` is the subcommand, which
/// must agree with the document's "experiment" field when both are given.
/// Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              std::optional<ExperimentKind> expected = std::nullopt);
ExperimentConfig read_config(const std::filesystem::path& path, std::optional<ExperimentKind> expected = std::nullopt);

/// Default test functions: phi1 = delta(., [e_1]), phi2 = delta(., [e_2^*]).
HolderTestFunction default_phi1(std::size_t d);
HolderTestFunction default_phi2(std::size_t d);

/// Runs the experiment and writes <out>/<experiment>.csv and .json.
/// Returns 0; throws ConfigError / InvariantError / UsageError / DomainError
/// on bad input.  Warnings go to `log`.
int run(const ExperimentConfig& config, std::ostream& log);

/// `kak` subcommand: decomposition of one matrix as JSON text.
std::string kak_report(const std::filesystem::path& matrix_file);

struct CertifyOutcome {
  bool certified = false;
  std::string json;
};

/// `certify` subcommand.  Real generators use floating point unless `exact`
/// asks for the rigorous mode; p-adic generators are always exact.
CertifyOutcome certify_report(const std::filesystem::path& generators_file, double r, double eps, bool exact);

/// Prints a one-line diagnostic and returns exit code 2.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace freewalk
