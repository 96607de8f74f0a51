#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace beamspin {

/// Minimal CSV interchange table: `#`-prefixed comment block, a names row,
/// a units row, then data rows.  Numeric cells are rendered with %.17g so
/// values round-trip exactly.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> names;
  std::vector<std::string> units;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;            // -1 if absent
  std::vector<double> numeric_column(std::string_view name) const;  // throws if absent/NaNs ok
};

std::string format_cell(double v);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);  // throws std::runtime_error with context

} // namespace beamspin
