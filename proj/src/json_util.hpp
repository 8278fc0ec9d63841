#pragma once

// Shared JSON reading helpers: syntax errors report line:col, field errors
// report a JSON pointer.

#include <string>

#include <json.hpp>

#include "freewalk/errors.hpp"
#include "freewalk/scalar.hpp"

namespace freewalk::jsonio {

using nlohmann::json;

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() repeats the byte offset; keep only the reason after "; "
    std::string msg = e.what();
    if (auto k = msg.find("syntax error"); k != std::string::npos) msg = msg.substr(k);
    throw ConfigError(source + ":" + line_col(text, e.byte), msg);
  }
}

struct Ctx {
  const std::string& source;
  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    throw ConfigError(source + ": " + (pointer.empty() ? "/" : pointer), what);
  }
};

inline const json& member(const Ctx& ctx, const json& obj, const std::string& pointer, const char* key) {
  if (!obj.is_object()) ctx.fail(pointer, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) ctx.fail(pointer + "/" + key, "missing field");
  return *it;
}

inline Rational scalar_of(const Ctx& ctx, const json& v, const std::string& pointer, const FieldSpec& field) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
      ctx.fail(pointer, e.what());
    }
  }
  if (v.is_number_integer()) {
    if (v.is_number_unsigned()) return Rational(Integer(std::to_string(v.get<std::uint64_t>())));
    return Rational(Integer(std::to_string(v.get<std::int64_t>())));
  }
  if (v.is_number_float()) {
    if (!field.is_archimedean()) ctx.fail(pointer, "p-adic entries must be integers or \"num/den\" strings");
    return Rational(v.get<double>());
  }
  ctx.fail(pointer, "expected a number or a \"num/den\" string");
}

inline FieldSpec field_of(const Ctx& ctx, const json& v, const std::string& pointer) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "real" || s == "R" || s == "archimedean") return FieldSpec::real();
    if (s.size() > 2 && s.rfind("Q_", 0) == 0) {
      try {
        return FieldSpec::padic(static_cast<std::uint32_t>(std::stoul(s.substr(2))));
      } catch (const std::exception& e) {
        ctx.fail(pointer, std::string("bad field '") + s + "': " + e.what());
      }
    }
    ctx.fail(pointer, "unknown field '" + s + "' (use \"real\" or \"Q_p\")");
  }
  const auto& kind = member(ctx, v, pointer, "kind");
  if (!kind.is_string()) ctx.fail(pointer + "/kind", "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "archimedean" || k == "real") return FieldSpec::real();
  if (k == "nonarchimedean" || k == "padic") {
    const auto& p = member(ctx, v, pointer, "prime");
    if (!p.is_number_unsigned()) ctx.fail(pointer + "/prime", "expected a positive integer");
    try {
      return FieldSpec::padic(p.get<std::uint32_t>());
    } catch (const std::exception& e) {
      ctx.fail(pointer + "/prime", e.what());
    }
  }
  ctx.fail(pointer + "/kind", "unknown field kind '" + k + "'");
}

}  // namespace freewalk::jsonio
