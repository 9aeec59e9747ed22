#pragma once

#include "diffassoc/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace diffassoc {

/// Parses a numeric CSV matrix: rows are samples, columns are features,
/// comma separated with '.' decimals. A first row whose first cell is not a
/// number is taken as a header and skipped. Blank lines are ignored.
/// Throws MalformedInput naming `source`, the line and the column for any
/// non-numeric or non-finite cell, ragged row, or empty input.
MatrixXd parse_csv_matrix(const std::string& text, const std::string& source = "<input>");

MatrixXd read_csv_matrix(const std::filesystem::path& path);

/// Writes values with shortest round-trip formatting and no header.
void write_csv_matrix(std::ostream& out, const MatrixXd& values);
void write_csv_matrix(const std::filesystem::path& path, const MatrixXd& values);

}  // namespace diffassoc
