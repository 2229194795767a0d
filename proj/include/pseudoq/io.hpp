#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pseudoq/errors.hpp"
#include "pseudoq/matrix.hpp"

namespace pseudoq::io {

using Json = nlohmann::ordered_json;

// Malformed input documents (bad JSON, wrong shape, non-finite numbers).
// Distinct from Error so the CLI can map it to the usage/schema exit code.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { StateVector, Operator2, Operator4, DensityMatrix };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::StateVector: return "state_vector";
    case Kind::Operator2: return "operator2";
    case Kind::Operator4: return "operator4";
    case Kind::DensityMatrix: return "density_matrix";
  }
  return "";
}

inline Kind kind_from(const std::string& s) {
  if (s == "state_vector") return Kind::StateVector;
  if (s == "operator2") return Kind::Operator2;
  if (s == "operator4") return Kind::Operator4;
  if (s == "density_matrix") return Kind::DensityMatrix;
  throw SchemaError("unknown document kind: " + s);
}

// One matrix-like object per file. Which payload member is live follows
// from `kind` (vec / m2 / m4; density matrices share m4).
struct MatrixDocument {
  Kind kind = Kind::StateVector;
  std::optional<std::string> label;
  StateVector vec;
  Mat2 m2;
  Mat4 m4;
};

namespace detail {

inline void write_double(std::string& out, double v) {
  if (!std::isfinite(v))
    throw Error(Errc::InternalCheck, "non-finite number reached the writer");
  if (v == 0.0) {  // normalizes -0
    out += '0';
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void write_value(std::string& out, const Json& j, bool pretty,
                        int depth) {
  const auto indent = [&out, pretty](int d) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };

  if (j.is_number_float()) {
    write_double(out, j.get<double>());
  } else if (j.is_array()) {
    out += '[';
    bool first = true;
    for (const auto& el : j) {
      if (!first) out += ',';
      first = false;
      indent(depth + 1);
      write_value(out, el, pretty, depth + 1);
    }
    if (!j.empty()) indent(depth);
    out += ']';
  } else if (j.is_object()) {
    out += '{';
    bool first = true;
    for (const auto& [key, val] : j.items()) {
      if (!first) out += ',';
      first = false;
      indent(depth + 1);
      out += Json(key).dump();
      out += pretty ? ": " : ":";
      write_value(out, val, pretty, depth + 1);
    }
    if (!j.empty()) indent(depth);
    out += '}';
  } else {
    out += j.dump();  // strings (escaped), integers, booleans, null
  }
}

}  // namespace detail

// Deterministic serialization: insertion-ordered keys, 17 significant
// digits, no negative zero, trailing newline.
inline std::string canonical_dump(const Json& j, bool pretty = false) {
  std::string out;
  detail::write_value(out, j, pretty, 0);
  out += '\n';
  return out;
}

inline Json pair_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json vec_json(const StateVector& v) {
  Json a = Json::array();
  for (std::size_t i = 0; i < 4; ++i) a.push_back(pair_json(v[i]));
  return a;
}

template <std::size_t N>
Json mat_json(const Matrix<N>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < N; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < N; ++j) row.push_back(pair_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline Json doc_json(const MatrixDocument& d) {
  Json j;
  j["format"] = 1;
  j["kind"] = kind_name(d.kind);
  if (d.label) j["label"] = *d.label;
  switch (d.kind) {
    case Kind::StateVector: j["data"] = vec_json(d.vec); break;
    case Kind::Operator2: j["data"] = mat_json(d.m2); break;
    default: j["data"] = mat_json(d.m4); break;
  }
  return j;
}

namespace detail {

inline double parse_num(const nlohmann::json& j, const char* ctx) {
  if (!j.is_number())
    throw SchemaError(std::string(ctx) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v))
    throw SchemaError(std::string(ctx) + ": number is not finite");
  return v;
}

inline Complex parse_pair(const nlohmann::json& j, const char* ctx) {
  if (!j.is_array() || j.size() != 2)
    throw SchemaError(std::string(ctx) + ": expected an [re, im] pair");
  return Complex(parse_num(j[0], ctx), parse_num(j[1], ctx));
}

inline StateVector parse_vec(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4)
    throw SchemaError("state_vector data must hold 4 [re, im] pairs");
  StateVector v;
  for (std::size_t i = 0; i < 4; ++i) v[i] = parse_pair(j[i], "state_vector");
  return v;
}

template <std::size_t N>
Matrix<N> parse_mat(const nlohmann::json& j, const char* ctx) {
  Matrix<N> m;
  if (!j.is_array() || j.size() != N)
    throw SchemaError(std::string(ctx) + ": data must be a " +
                      std::to_string(N) + "x" + std::to_string(N) + " grid");
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_array() || j[i].size() != N)
      throw SchemaError(std::string(ctx) + ": data must be a " +
                        std::to_string(N) + "x" + std::to_string(N) + " grid");
    for (std::size_t k = 0; k < N; ++k) m(i, k) = parse_pair(j[i][k], ctx);
  }
  return m;
}

}  // namespace detail

inline MatrixDocument parse_document(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("document must be a JSON object");
  if (!j.contains("format") || !j["format"].is_number_integer() ||
      j["format"].get<int>() != 1)
    throw SchemaError("document must carry \"format\": 1");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("document must carry a \"kind\" string");
  if (!j.contains("data")) throw SchemaError("document must carry \"data\"");

  MatrixDocument d;
  d.kind = kind_from(j["kind"].get<std::string>());
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw SchemaError("label must be a string");
    d.label = j["label"].get<std::string>();
  }
  switch (d.kind) {
    case Kind::StateVector: d.vec = detail::parse_vec(j["data"]); break;
    case Kind::Operator2: d.m2 = detail::parse_mat<2>(j["data"], "operator2"); break;
    case Kind::Operator4: d.m4 = detail::parse_mat<4>(j["data"], "operator4"); break;
    case Kind::DensityMatrix:
      d.m4 = detail::parse_mat<4>(j["data"], "density_matrix");
      break;
  }
  return d;
}

}  // namespace pseudoq::io
