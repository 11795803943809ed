#include "hibreak/json_io.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "hibreak/errors.hpp"

namespace hibreak {

nlohmann::ordered_json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::InvalidArgument, "expected a JSON number");
}

nlohmann::ordered_json json_vector(const Vector& v) {
  auto out = nlohmann::ordered_json::array();
  for (double x : v) out.push_back(json_number(x));
  return out;
}

Vector vector_from_json(const nlohmann::ordered_json& j) {
  Vector out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

std::string format_full(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace hibreak
