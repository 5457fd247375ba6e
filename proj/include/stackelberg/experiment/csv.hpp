#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stackelberg {

// Header plus numeric rows. Rows must match the header width.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a column by name; throws kInvalidArgument when absent.
  std::size_t Column(std::string_view name) const;
};

// %.17g, so parsing the text recovers the double exactly. Non-finite values
// are written as nan, inf and -inf.
std::string FormatNumber(double value);

void WriteCsv(std::ostream& out, const CsvTable& table);
std::string FormatCsv(const CsvTable& table);
// Writes the file, creating parent directories; kIo on failure.
void SaveCsv(const std::string& path, const CsvTable& table);

// Inverse of WriteCsv. kIo on malformed input.
CsvTable ParseCsv(std::string_view text);

}  // namespace stackelberg
