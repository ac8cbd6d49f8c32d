#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bibc {
namespace csv {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

// Locale-independent formatting; doubles carry 12 significant digits which
// round-trips every value we emit. Non-finite doubles format as nan/inf.
inline std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), *d, std::chars_format::general, 12);
    if (res.ec != std::errc()) throw std::runtime_error("csv: number formatting failed");
    return std::string(buf, res.ptr);
  }
  const std::string& s = std::get<std::string>(cell);
  for (char c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"')
      throw std::invalid_argument("csv: string cell needs no quoting by contract, got: " + s);
  return s;
}

inline std::string render(const Table& table) {
  if (table.header.empty()) throw std::invalid_argument("csv: empty header");
  std::string out;
  for (size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += format_cell(table.header[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("csv: row width disagrees with header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline void write(const Table& table, const std::string& path) {
  std::string body = render(table);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot open for writing: " + path);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw std::runtime_error("csv: write failed: " + path);
}

}  // namespace csv
}  // namespace bibc
