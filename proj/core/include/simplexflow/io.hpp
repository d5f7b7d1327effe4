#pragma once

#include <string>
#include <vector>

#include "simplexflow/types.hpp"

namespace simplexflow {

/// Plain-text matrix format: one row per line, space-separated decimals.
Matrix parse_matrix_text(const std::string& text);
std::string format_matrix_text(const Matrix& m);

/// 17 significant digits: lossless round-trip for doubles.
std::string format_double(double v);

/// JSON object {"n": ..., "entries": [[...]]} (string-level API so the JSON
/// implementation stays private to the library).
std::string matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const std::string& text);

/// CSV with header "t,x1,...,xn".
std::string trajectory_csv(const std::vector<double>& times,
                           const std::vector<Vector>& states);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace simplexflow
