#include "vprisk/csv.hpp"

#include "vprisk/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vprisk::csv {

std::string format_double(double value) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string escape_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_cell(std::string_view cell, long row, long col) {
  const std::string_view t = trim(cell);
  if (t.empty()) {
    throw ParseError("empty cell at row " + std::to_string(row) + ", column " + std::to_string(col),
                     row, col);
  }
  // from_chars rejects a leading '+'; accept it for hand-written files.
  std::string_view digits = t;
  if (digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ParseError("non-numeric cell '" + std::string(t) + "' at row " + std::to_string(row) +
                         ", column " + std::to_string(col),
                     row, col);
  }
  return value;
}

}  // namespace

Eigen::MatrixXd parse_matrix(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const long row = static_cast<long>(k) + 1;
    const std::string_view line = lines[k];
    if (trim(line).empty()) throw ParseError("blank line at row " + std::to_string(row), row, 0);
    std::vector<double> values;
    long col = 0;
    for (std::size_t cpos = 0;;) {
      std::size_t cend = line.find(',', cpos);
      const bool last = cend == std::string_view::npos;
      if (last) cend = line.size();
      values.push_back(parse_cell(line.substr(cpos, cend - cpos), row, ++col));
      if (last) break;
      cpos = cend + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ParseError("ragged row " + std::to_string(row) + ": expected " +
                           std::to_string(rows.front().size()) + " columns, found " +
                           std::to_string(values.size()),
                       row, static_cast<long>(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("empty CSV document", 0, 0);

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str());
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_matrix(out, m);
}

Writer::Writer(std::ostream& out, std::vector<std::string> header)
    : out_(out), header_(std::move(header)) {
  write_row(header_);
}

void Writer::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) {
    throw InvalidArgument("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header_.size()));
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) out_ << ',';
    out_ << escape_field(cells[k]);
  }
  out_ << '\n';
}

}  // namespace vprisk::csv
