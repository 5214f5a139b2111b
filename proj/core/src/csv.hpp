#pragma once

// Line/field splitting shared by the CSV readers. Internal header.

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fiseis/error.hpp"

namespace fiseis::detail {

struct CsvLine {
  std::size_t number;  // 1-based
  std::vector<std::string_view> fields;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits into non-blank lines; strips a UTF-8 byte-order mark.
inline std::vector<CsvLine> split_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<CsvLine> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    line = trim(line);
    if (line.empty()) continue;
    CsvLine out{number, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      out.fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    lines.push_back(std::move(out));
  }
  return lines;
}

inline double parse_finite(std::string_view field, std::size_t line, const char* what) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw ParseError(std::string("cannot parse ") + what + " '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(value)) {
    throw ParseError(std::string("non-finite ") + what, line);
  }
  return value;
}

inline void expect_header(const std::vector<CsvLine>& lines,
                          const std::vector<std::string_view>& names) {
  if (lines.empty()) throw ParseError("empty input");
  const auto& header = lines.front();
  bool ok = header.fields.size() == names.size();
  for (std::size_t i = 0; ok && i < names.size(); ++i) ok = header.fields[i] == names[i];
  if (!ok) {
    std::string expected;
    for (auto n : names) expected += (expected.empty() ? "" : ",") + std::string(n);
    throw ParseError("expected header '" + expected + "'", header.number);
  }
}

}  // namespace fiseis::detail
