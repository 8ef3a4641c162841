#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lsirm {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerant.
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column position by name; throws DataError when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

// Every row must have as many fields as the header (DataError otherwise).
CsvTable read_csv(std::istream& in);

std::string csv_escape(const std::string& field);

// Shortest round-trippable form is not needed; 17 significant digits is
// exact for IEEE doubles.
std::string format_double(double v);

double parse_double(const std::string& s);

}  // namespace lsirm
