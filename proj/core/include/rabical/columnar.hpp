#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rabical {

// Plain-text columnar file:
//
//   # key=value        (zero or more metadata lines)
//   col_a,col_b,...    (header)
//   1.5,2,...          (rows)
//
// Numbers are written in shortest round-trip form so a write/read cycle is
// lossless and reruns are byte-identical.
class ColumnTable {
 public:
  ColumnTable() = default;
  explicit ColumnTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return cells_.size(); }

  void set_meta(const std::string& key, const std::string& value);
  // Throws std::out_of_range when missing.
  const std::string& meta(const std::string& key) const;
  bool has_meta(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& meta_entries() const {
    return meta_;
  }

  void add_row(std::vector<std::string> cells);
  void add_numeric_row(const std::vector<double>& values);

  // Throws std::out_of_range for unknown columns.
  std::size_t column_index(const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;
  std::vector<double> numeric_column(const std::string& column) const;

  std::string to_string() const;
  // Throws std::invalid_argument on malformed text.
  static ColumnTable parse(const std::string& text);

 private:
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> cells_;
};

std::string format_number(double v);
// Throws std::invalid_argument when the whole string is not a number.
double parse_number(const std::string& s);

// Write-then-rename. Throws IoError when the file cannot be written.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
// Throws MissingInputError when absent, IoError when unreadable.
std::string read_file(const std::filesystem::path& path);

void write_table(const std::filesystem::path& path, const ColumnTable& table);
ColumnTable read_table(const std::filesystem::path& path);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace rabical
