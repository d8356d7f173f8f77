#include "matframe/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace matframe::io {
namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw SchemaError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

long long require_integer(const Json& j, const std::string& field) {
  if (!j.is_number_integer()) throw SchemaError(field + " must be an integer");
  return j.get<long long>();
}

}  // namespace

Json real_to_json(double x, bool human) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (human) return x;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::hex);
  std::string s(buf, res.ptr);
  // to_chars omits the prefix; put the sign before it.
  if (!s.empty() && s.front() == '-') return "-0x" + s.substr(1);
  return "0x" + s;
}

double real_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
      throw SchemaError(field + ": cannot parse real \"" + s + "\"");
    return v;
  }
  throw SchemaError(field + " must be a number or a real-valued string");
}

Json vector_to_json(const Vector& v, bool human) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(real_to_json(v(k), human));
  return a;
}

Json matrix_to_json(const Matrix& m, bool human) {
  Json a = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) a.push_back(real_to_json(m(r, c), human));
  return a;
}

Json subset_to_json(const Subset& s) {
  Json a = Json::array();
  for (std::size_t i : s) a.push_back(i + 1);
  return a;
}

FrameFile parse_frame_file(const Json& j) {
  if (!j.is_object()) throw SchemaError("frame file must be a JSON object");
  const long long version = require_integer(require(j, "schema_version", "frame file"),
                                            "schema_version");
  if (version != kSchemaVersion)
    throw SchemaError("schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
  const long long d = require_integer(require(j, "d", "frame file"), "d");
  if (d < 1) throw SchemaError("d must be positive");

  const Json& blocks_json = require(j, "blocks", "frame file");
  if (!blocks_json.is_array() || blocks_json.empty())
    throw SchemaError("blocks must be a nonempty array");
  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < blocks_json.size(); ++i) {
    const std::string where = "blocks[" + std::to_string(i) + "]";
    const Json& b = blocks_json[i];
    const long long cols = require_integer(require(b, "cols", where), where + ".cols");
    if (cols < 1) throw SchemaError(where + ".cols must be positive");
    const Json& data = require(b, "data", where);
    if (!data.is_array()) throw SchemaError(where + ".data must be an array");
    if (static_cast<long long>(data.size()) != d * cols)
      throw SchemaError(where + ".data has " + std::to_string(data.size()) +
                        " entries, expected d*cols = " + std::to_string(d * cols));
    Matrix x(d, cols);
    for (long long r = 0; r < d; ++r)
      for (long long c = 0; c < cols; ++c) {
        const auto k = static_cast<std::size_t>(r * cols + c);
        x(r, c) = real_from_json(data[k], where + ".data[" + std::to_string(k) + "]");
      }
    if (!x.allFinite()) throw SchemaError(where + ".data has non-finite entries");
    blocks.push_back(std::move(x));
  }
  MatrixFrame frame(static_cast<Index>(d), std::move(blocks));

  std::optional<WeightVector> weights;
  if (j.contains("weights") && !j.at("weights").is_null()) {
    const Json& w = j.at("weights");
    if (!w.is_array()) throw SchemaError("weights must be an array");
    if (w.size() != frame.size())
      throw SchemaError("weights has " + std::to_string(w.size()) + " entries for " +
                        std::to_string(frame.size()) + " blocks");
    std::vector<Rational> values;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string where = "weights[" + std::to_string(i) + "]";
      const long long num = require_integer(require(w[i], "num", where), where + ".num");
      const long long den = require_integer(require(w[i], "den", where), where + ".den");
      if (den <= 0) throw SchemaError(where + ".den must be positive");
      if (num <= 0) throw SchemaError(where + ".num must be positive");
      values.emplace_back(num, den);
    }
    weights.emplace(std::move(values));
  }
  return {static_cast<int>(version), std::move(frame), std::move(weights)};
}

FrameFile read_frame_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": invalid JSON (" + e.what() + ")");
  }
  return parse_frame_file(j);
}

Json frame_to_json(const MatrixFrame& frame, const std::optional<WeightVector>& weights,
                   bool human) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["d"] = frame.dim();
  Json blocks = Json::array();
  for (const Matrix& x : frame.blocks()) {
    Json b;
    b["cols"] = x.cols();
    b["data"] = matrix_to_json(x, human);
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  if (weights) {
    Json w = Json::array();
    for (const Rational& c : weights->values()) {
      Json e;
      e["num"] = boost::multiprecision::numerator(c).convert_to<long long>();
      e["den"] = boost::multiprecision::denominator(c).convert_to<long long>();
      w.push_back(std::move(e));
    }
    j["weights"] = std::move(w);
  }
  return j;
}

void write_frame_file(const std::string& path, const MatrixFrame& frame,
                      const std::optional<WeightVector>& weights, bool human) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path);
  out << frame_to_json(frame, weights, human).dump(2) << '\n';
}

}  // namespace matframe::io
