#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ksos {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);
/// Empty string for a missing value.
std::string format_optional(const std::optional<double>& v);
/// Three significant digits, for human-readable tables.
std::string format_sig3(double v);

double parse_double(std::string_view text);
std::optional<double> parse_optional(std::string_view text);

/// RFC 4180 writer: CRLF-free, fields quoted only when they need it.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
};

using CsvTable = std::vector<std::vector<std::string>>;

CsvTable read_csv(std::istream& in);

}  // namespace ksos
