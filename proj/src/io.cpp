#include "freewalk/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace freewalk {

namespace {

using namespace jsonio;

struct Header {
  FieldSpec field;
  std::size_t d = 0;
};

Header header_of(const Ctx& ctx, const json& root) {
  if (!root.is_object()) ctx.fail("", "expected a JSON object");
  const json* h = &root;
  std::string base;
  if (auto it = root.find("header"); it != root.end()) {
    h = &*it;
    base = "/header";
  }
  Header out;
  out.field = field_of(ctx, member(ctx, *h, base, "field"), base + "/field");
  const auto& d = member(ctx, *h, base, "d");
  if (!d.is_number_unsigned() || d.get<std::size_t>() < 1) ctx.fail(base + "/d", "expected a positive integer");
  out.d = d.get<std::size_t>();
  return out;
}

Matrix<Rational> matrix_of(const Ctx& ctx, const json& v, const std::string& pointer, const Header& h) {
  if (!v.is_array() || v.size() != h.d) ctx.fail(pointer, "expected " + std::to_string(h.d) + " rows");
  Matrix<Rational> m(h.d, h.d);
  for (std::size_t i = 0; i < h.d; ++i) {
    const auto row_ptr = pointer + "/" + std::to_string(i);
    const auto& row = v[i];
    if (!row.is_array() || row.size() != h.d) ctx.fail(row_ptr, "expected " + std::to_string(h.d) + " entries");
    for (std::size_t j = 0; j < h.d; ++j) m(i, j) = scalar_of(ctx, row[j], row_ptr + "/" + std::to_string(j), h.field);
  }
  return m;
}

std::vector<Matrix<Rational>> matrices_of(const Ctx& ctx, const json& root, const char* key, const Header& h) {
  const std::string pointer = std::string("/") + key;
  const auto& arr = member(ctx, root, "", key);
  if (!arr.is_array() || arr.empty()) ctx.fail(pointer, "expected a nonempty array of matrices");
  std::vector<Matrix<Rational>> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(matrix_of(ctx, arr[i], pointer + "/" + std::to_string(i), h));
  return out;
}

}  // namespace

MatrixFile parse_matrix_file(const std::string& text, const std::string& source) {
  const Ctx ctx{source};
  const json root = parse_json(text, source);
  const Header h = header_of(ctx, root);
  return {h.field, h.d, matrix_of(ctx, member(ctx, root, "", "matrix"), "/matrix", h)};
}

GeneratorsFile parse_generators_file(const std::string& text, const std::string& source) {
  const Ctx ctx{source};
  const json root = parse_json(text, source);
  const Header h = header_of(ctx, root);
  return {h.field, h.d, matrices_of(ctx, root, "generators", h)};
}

MeasureFile parse_measure_file(const std::string& text, const std::string& source) {
  const Ctx ctx{source};
  const json root = parse_json(text, source);
  const Header h = header_of(ctx, root);
  MeasureFile out{h.field, h.d, matrices_of(ctx, root, "atoms", h), {}, source};
  const auto& probs = member(ctx, root, "", "probs");
  if (!probs.is_array() || probs.size() != out.atoms.size()) {
    ctx.fail("/probs", "expected " + std::to_string(out.atoms.size()) + " probabilities, one per atom");
  }
  Rational total(0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    // probabilities are exact whatever the field
    Rational p = scalar_of(ctx, probs[i], "/probs/" + std::to_string(i), FieldSpec::real());
    if (p <= 0) ctx.fail("/probs/" + std::to_string(i), "probabilities must be positive");
    total += p;
    out.probs.push_back(p);
  }
  if (total != 1) ctx.fail("/probs", "probabilities sum to " + format_rational(total) + ", not 1");
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(path.string(), "cannot write file");
  out << text;
  if (!out) throw ConfigError(path.string(), "write failed");
}

MatrixFile read_matrix_file(const std::filesystem::path& path) {
  return parse_matrix_file(read_text(path), path.string());
}

GeneratorsFile read_generators_file(const std::filesystem::path& path) {
  return parse_generators_file(read_text(path), path.string());
}

MeasureFile read_measure_file(const std::filesystem::path& path) {
  return parse_measure_file(read_text(path), path.string());
}

std::string canonical_measure(const MeasureFile& m) {
  std::string s = m.field.to_string() + ";d=" + std::to_string(m.d);
  for (std::size_t k = 0; k < m.atoms.size(); ++k) {
    s += ";" + format_rational(m.probs[k]) + ":";
    for (std::size_t i = 0; i < m.d; ++i)
      for (std::size_t j = 0; j < m.d; ++j) s += (i || j ? "," : "") + format_rational(m.atoms[k](i, j));
  }
  return s;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string measure_hash(const MeasureFile& m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(canonical_measure(m))));
  return buf;
}

double round_sig(double x, int significant) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, x);
  return std::strtod(buf, nullptr);
}

}  // namespace freewalk
