#include "lassodiag/output.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "lassodiag/errors.hpp"

namespace lassodiag {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string out = "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv_table(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (header) {
      t.columns = std::move(cells);
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) throw DomainError("csv: row width differs from header");
    std::vector<double> row;
    for (const std::string& c : cells) {
      double v = 0.0;
      if (c == "nan") {
        v = std::nan("");
      } else if (c == "inf" || c == "-inf") {
        v = (c[0] == '-' ? -1.0 : 1.0) * std::numeric_limits<double>::infinity();
      } else {
        const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
        if (res.ec != std::errc() || res.ptr != c.data() + c.size()) throw DomainError("csv: bad number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (header) throw DomainError("csv: missing header");
  return t;
}

}  // namespace lassodiag
