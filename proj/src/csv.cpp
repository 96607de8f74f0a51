#include "beamspin/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace beamspin {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (const char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

} // namespace

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
  const int c = column(name);
  if (c < 0) throw std::runtime_error("csv: missing column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string& cell = rows[r].at(c);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str())
      throw std::runtime_error("csv: non-numeric cell in column '" + std::string(name) +
                               "', row " + std::to_string(r + 1) + ": '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

std::string format_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (const auto& c : table.comments) out << "# " << c << "\n";
  for (std::size_t i = 0; i < table.names.size(); ++i)
    out << table.names[i] << (i + 1 < table.names.size() ? "," : "\n");
  for (std::size_t i = 0; i < table.units.size(); ++i)
    out << table.units[i] << (i + 1 < table.units.size() ? "," : "\n");
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
  }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot open for writing: " + path);
  write_csv(f, table);
  if (!f) throw std::runtime_error("csv: write failed: " + path);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  int header_rows = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      std::string c = line.substr(1);
      if (!c.empty() && c[0] == ' ') c.erase(0, 1);
      table.comments.push_back(c);
      continue;
    }
    const std::vector<std::string> cells = split_row(line);
    if (header_rows == 0) {
      table.names = cells;
      header_rows = 1;
    } else if (header_rows == 1) {
      table.units = cells;
      header_rows = 2;
    } else {
      if (cells.size() != table.names.size())
        throw std::runtime_error("csv: row " + std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(table.names.size()));
      table.rows.push_back(cells);
    }
  }
  if (header_rows < 2) throw std::runtime_error("csv: missing name/unit header rows");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot open: " + path);
  try {
    return read_csv(f);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

} // namespace beamspin
