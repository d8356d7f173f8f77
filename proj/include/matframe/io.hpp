#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "matframe/frame.hpp"

namespace matframe::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent frame file. The message names the offending field.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * On-disk frame:
 *
 *   { "schema_version": 1, "d": 2,
 *     "blocks": [ { "cols": 1, "data": ["0x1p+0", "-0x1p+0"] }, ... ],
 *     "weights": [ { "num": 2, "den": 3 }, ... ] }      // optional
 *
 * `data` is row-major (d * cols reals). Reals are written as hex-float strings
 * so that files round-trip bit-exactly; plain JSON numbers and decimal strings
 * are accepted on input.
 */
struct FrameFile {
  int schema_version = kSchemaVersion;
  MatrixFrame frame;
  std::optional<WeightVector> weights;
};

FrameFile parse_frame_file(const Json& j);
FrameFile read_frame_file(const std::string& path);

Json frame_to_json(const MatrixFrame& frame, const std::optional<WeightVector>& weights,
                   bool human = false);
void write_frame_file(const std::string& path, const MatrixFrame& frame,
                      const std::optional<WeightVector>& weights, bool human = false);

/// Hex-float string (e.g. "0x1.8p+1"), or a JSON number when `human` is set.
/// Non-finite values always become the strings "inf", "-inf" or "nan".
Json real_to_json(double x, bool human);
double real_from_json(const Json& j, const std::string& field);

Json vector_to_json(const Vector& v, bool human);
/// Row-major flattening.
Json matrix_to_json(const Matrix& m, bool human);
/// 1-based indices, the convention of all reports.
Json subset_to_json(const Subset& s);

}  // namespace matframe::io
