#include "simplexflow/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace simplexflow {

Matrix parse_matrix_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("empty matrix text");
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InputError("ragged matrix text");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_matrix_text(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string matrix_to_json(const Matrix& m) {
  nlohmann::json j;
  j["n"] = m.rows();
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

Matrix matrix_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("entries") || !j["entries"].is_array())
    throw InputError("matrix JSON must contain an \"entries\" array");
  const auto& entries = j["entries"];
  const std::size_t rows = entries.size();
  if (rows == 0) throw InputError("matrix JSON has no rows");
  const std::size_t cols = entries[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (entries[i].size() != cols) throw InputError("ragged matrix JSON");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = entries[i][k].get<double>();
  }
  return m;
}

std::string trajectory_csv(const std::vector<double>& times,
                           const std::vector<Vector>& states) {
  std::string out = "t";
  const int n = states.empty() ? 0 : static_cast<int>(states.front().size());
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    out += format_double(times[k]);
    for (int i = 0; i < n; ++i) {
      out += ',';
      out += format_double(states[k][i]);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace simplexflow
