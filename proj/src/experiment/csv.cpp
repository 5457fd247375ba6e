#include "stackelberg/experiment/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stackelberg/error.hpp"

namespace stackelberg {

std::size_t CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorKind::kInvalidArgument, "no column '" + std::string(name) + "'");
}

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void WriteCsv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw Error(ErrorKind::kDimensionMismatch, "csv row width does not match the header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << FormatNumber(row[i]);
    out << '\n';
  }
}

std::string FormatCsv(const CsvTable& table) {
  std::ostringstream os;
  WriteCsv(os, table);
  return os.str();
}

void SaveCsv(const std::string& path, const CsvTable& table) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  WriteCsv(out, table);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write to '" + path + "' failed");
}

CsvTable ParseCsv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw Error(ErrorKind::kIo, "csv has no header");
  {
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) table.header.push_back(cell);
  }
  long number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') {
        throw Error(ErrorKind::kIo, "csv line " + std::to_string(number) + ": bad number '" +
                                        cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw Error(ErrorKind::kIo, "csv line " + std::to_string(number) + ": expected " +
                                      std::to_string(table.header.size()) + " fields");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace stackelberg
