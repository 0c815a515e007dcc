#pragma once

#include <string>
#include <vector>

namespace lassodiag {

/// Version stamped into every CSV header comment and JSON document.
inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// CSV text: "# schema_version: N", the header row, then one row per record.
std::string csv_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

/// Parses text produced by csv_table (comment lines skipped). Throws DomainError on malformed input.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv_table(const std::string& text);

}  // namespace lassodiag
