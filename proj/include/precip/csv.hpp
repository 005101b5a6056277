#pragma once

// Small CSV writer/reader for the tool's own outputs. Every file starts with
// a version line so readers can reject formats they do not know.

#include <iosfwd>
#include <string>
#include <vector>

namespace precip {

inline constexpr const char* kCsvVersionLine = "# precip-glaw v1";

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws DataError if absent
  double number(std::size_t row, const std::string& name) const;
};

// Shortest text that parses back to the same double (%.17g).
std::string format_number(double x);

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

}  // namespace precip
