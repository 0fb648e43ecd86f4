#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vprisk::csv {

/// Shortest round-trippable text for a double: 17 significant digits, '.' decimal point.
std::string format_double(double value);

/// Quotes a field when it contains a comma, quote or line break (RFC 4180).
std::string escape_field(std::string_view field);

/// Parses a headerless, rectangular, numeric CSV document.
///
/// Blank trailing lines are ignored. Ragged rows and unparsable cells raise
/// ParseError with the 1-based row/column of the first problem.
Eigen::MatrixXd parse_matrix(std::string_view text);

Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Row-oriented writer: header first, then one call per row. Lines end in '\n'.
class Writer {
 public:
  Writer(std::ostream& out, std::vector<std::string> header);

  void write_row(const std::vector<std::string>& cells);
  std::size_t columns() const noexcept { return header_.size(); }

 private:
  std::ostream& out_;
  std::vector<std::string> header_;
};

}  // namespace vprisk::csv
