#pragma once

// JSON input files (matrices, generator lists, measures), deterministic
// number formatting for outputs, and measure hashing.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "freewalk/matrix.hpp"
#include "freewalk/scalar.hpp"

namespace freewalk {

/// {"header": {"field": ..., "d": 2}, "matrix": [["1", "2"], ["0", "1"]]}
struct MatrixFile {
  FieldSpec field;
  std::size_t d = 0;
  Matrix<Rational> matrix;
};

/// Same header, then "generators": [matrix, ...].
struct GeneratorsFile {
  FieldSpec field;
  std::size_t d = 0;
  std::vector<Matrix<Rational>> generators;
};

/// Same header, then "atoms": [matrix, ...] and "probs": ["1/2", ...].
/// The header may also be flattened into the top level.
struct MeasureFile {
  FieldSpec field;
  std::size_t d = 0;
  std::vector<Matrix<Rational>> atoms;
  std::vector<Rational> probs;
  std::string source;  // file name, for diagnostics
};

// Parsers throw ConfigError with "source:line:col" for syntax errors and
// "source: /json/pointer" for field errors.
MatrixFile parse_matrix_file(const std::string& text, const std::string& source);
GeneratorsFile parse_generators_file(const std::string& text, const std::string& source);
MeasureFile parse_measure_file(const std::string& text, const std::string& source);

MatrixFile read_matrix_file(const std::filesystem::path& path);
GeneratorsFile read_generators_file(const std::filesystem::path& path);
MeasureFile read_measure_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Canonical text of a measure: field, d, atoms and probs as reduced
/// rationals.  Its FNV-1a hash identifies the measure in result sidecars.
std::string canonical_measure(const MeasureFile& m);
std::uint64_t fnv1a64(const std::string& bytes);
std::string measure_hash(const MeasureFile& m);  // "fnv1a64:<16 hex digits>"

/// x rounded to `significant` digits (printf %.*g then strtod), so that
/// JSON/CSV output is stable at that precision.
double round_sig(double x, int significant = 12);

}  // namespace freewalk
