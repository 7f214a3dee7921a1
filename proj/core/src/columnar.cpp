#include "rabical/columnar.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

#include "rabical/error.hpp"

namespace rabical {
namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

ColumnTable::ColumnTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void ColumnTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

const std::string& ColumnTable::meta(const std::string& key) const {
  for (const auto& [k, v] : meta_) {
    if (k == key) return v;
  }
  throw std::out_of_range(fmt::format("missing metadata key '{}'", key));
}

bool ColumnTable::has_meta(const std::string& key) const {
  for (const auto& kv : meta_) {
    if (kv.first == key) return true;
  }
  return false;
}

void ColumnTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw std::invalid_argument(fmt::format("row has {} cells, table has {} columns",
                                            cells.size(), columns_.size()));
  }
  cells_.push_back(std::move(cells));
}

void ColumnTable::add_numeric_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (const double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

std::size_t ColumnTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw std::out_of_range(fmt::format("missing column '{}'", name));
}

const std::string& ColumnTable::cell(std::size_t row, const std::string& column) const {
  return cells_.at(row).at(column_index(column));
}

double ColumnTable::number(std::size_t row, const std::string& column) const {
  return parse_number(cell(row, column));
}

std::vector<double> ColumnTable::numeric_column(const std::string& column) const {
  const std::size_t c = column_index(column);
  std::vector<double> out;
  out.reserve(cells_.size());
  for (const auto& row : cells_) out.push_back(parse_number(row[c]));
  return out;
}

std::string ColumnTable::to_string() const {
  std::string out;
  for (const auto& [k, v] : meta_) {
    out += fmt::format("# {}={}\n", k, v);
  }
  out += fmt::format("{}\n", fmt::join(columns_, ","));
  for (const auto& row : cells_) {
    out += fmt::format("{}\n", fmt::join(row, ","));
  }
  return out;
}

ColumnTable ColumnTable::parse(const std::string& text) {
  ColumnTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.rfind("# ", 0) == 0) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
          throw std::invalid_argument(
              fmt::format("line {}: metadata line without '='", line_no));
        }
        t.meta_.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
        continue;
      }
      if (line.empty()) continue;
      t.columns_ = split_commas(line);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != t.columns_.size()) {
      throw std::invalid_argument(fmt::format("line {}: expected {} cells, got {}", line_no,
                                              t.columns_.size(), cells.size()));
    }
    t.cells_.push_back(std::move(cells));
  }
  if (!have_header) {
    throw std::invalid_argument("columnar file has no header line");
  }
  return t;
}

std::string format_number(double v) { return fmt::format("{}", v); }

double parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument(fmt::format("not a number: '{}'", s));
  }
  return v;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError(fmt::format("cannot create directory {}: {}",
                                path.parent_path().string(), ec.message()));
    }
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError(fmt::format("cannot open {} for writing", tmp.string()));
    }
    out << contents;
    out.flush();
    if (!out) {
      throw IoError(fmt::format("write to {} failed", tmp.string()));
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(fmt::format("cannot move {} into place", path.string()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingInputError(fmt::format("missing input artifact {}", path.string()));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(fmt::format("cannot open {}", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_table(const std::filesystem::path& path, const ColumnTable& table) {
  write_file_atomic(path, table.to_string());
}

ColumnTable read_table(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return ColumnTable::parse(text);
  } catch (const std::invalid_argument& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace rabical
