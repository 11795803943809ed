#pragma once

#include <string>

#include "json.hpp"
#include "hibreak/matrix.hpp"

namespace hibreak {

// JSON has no encoding for non-finite numbers; they travel as the strings
// "inf", "-inf" and "nan".
nlohmann::ordered_json json_number(double v);
double number_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json json_vector(const Vector& v);
Vector vector_from_json(const nlohmann::ordered_json& j);

/// Shortest text that round-trips the double exactly ("inf"/"nan" for
/// non-finite values).
std::string format_full(double v);

}  // namespace hibreak
