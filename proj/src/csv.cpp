#include "diffassoc/csv.hpp"

#include "diffassoc/bench.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

namespace diffassoc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

MatrixXd parse_csv_matrix(const std::string& text, const std::string& source) {
  const auto fail = [&](std::size_t line, std::size_t column, const std::string& what) {
    std::string where = source + ": line " + std::to_string(line);
    if (column > 0) where += ", column " + std::to_string(column);
    throw Error(ErrorKind::MalformedInput, where + ": " + what);
  };

  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  bool first_row = true;

  std::string_view rest(text);
  std::size_t line_no = 0;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    const std::string_view line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;

    const auto cells = split_cells(line);
    if (first_row) {
      first_row = false;
      if (!parse_number(cells.front())) {
        cols = cells.size();
        continue;  // header
      }
    }
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols)
      fail(line_no, 0, "expected " + std::to_string(cols) + " columns, found " + std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) fail(line_no, c + 1, "non-numeric value '" + std::string(cells[c]) + "'");
      if (!std::isfinite(*v)) fail(line_no, c + 1, "non-finite value '" + std::string(cells[c]) + "'");
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) fail(line_no, 0, "no data rows");

  MatrixXd out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(static_cast<Index>(r), static_cast<Index>(c)) = values[r * cols + c];
  return out;
}

MatrixXd read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MalformedInput, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_matrix(buf.str(), path.string());
}

void write_csv_matrix(std::ostream& out, const MatrixXd& values) {
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

void write_csv_matrix(const std::filesystem::path& path, const MatrixXd& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, path.string() + ": cannot write file");
  write_csv_matrix(out, values);
}

}  // namespace diffassoc
