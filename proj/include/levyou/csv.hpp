#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace levyou {

/// Shortest text that round-trips an IEEE double at 17 significant digits;
/// infinities print as "inf"/"-inf".
std::string format_double(double x);

/// Parses the text produced by format_double (also accepts "inf").
double parse_double(std::string_view text);

/// Comma-separated writer: header row, '#' comment lines, 17-digit doubles.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void comment(std::string_view text);
  void header(std::initializer_list<std::string_view> columns);
  CsvWriter& field(double x);
  CsvWriter& field(long long x);
  CsvWriter& field(std::string_view x);
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace levyou
