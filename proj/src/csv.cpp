#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <unordered_set>

#include "hibreak/errors.hpp"
#include "hibreak/pipeline.hpp"

namespace hibreak {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one record. Double quotes delimit fields that may contain commas;
// "" inside a quoted field is a literal quote.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      cells.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  cells.push_back(was_quoted ? cur : trim(cur));
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, last, out, std::chars_format::general);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

}  // namespace

Dataset parse_csv(std::istream& in, const ModelSpec& model) {
  std::string line;
  std::vector<std::string> header;
  bool have_header = false;
  std::vector<std::string> labels;
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      header = split_record(line);
      have_header = true;
      if (header.size() < 2) throw ParseError(0, header.empty() ? "" : header[0], "header needs a label column and data columns");
      std::unordered_set<std::string> seen;
      for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError(0, "", "empty column name in header");
        if (!seen.insert(header[c]).second) throw ParseError(0, header[c], "duplicate column name");
      }
      continue;
    }
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_record(line);
    if (cells.size() != header.size()) {
      const std::string col = cells.size() < header.size() ? header[cells.size()] : header.back();
      throw ParseError(row, col, "expected " + std::to_string(header.size()) + " cells, found " +
                                     std::to_string(cells.size()));
    }
    labels.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) throw ParseError(row, header[c], "not a finite decimal number: '" + cells[c] + "'");
      values.push_back(v);
    }
  }
  if (!have_header) throw ParseError(0, "", "empty file");
  const std::size_t cols = header.size() - 1;
  Matrix m(labels.size(), cols);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
  std::vector<std::string> names(header.begin() + 1, header.end());
  return Dataset(std::move(labels), std::move(names), std::move(m), model);
}

Dataset load_csv(const std::filesystem::path& path, const ModelSpec& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'");
  return parse_csv(in, model);
}

}  // namespace hibreak
