#pragma once

// Numeric column extraction from CSV and JSON-lines input.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "benford/errors.hpp"

namespace benford {

inline constexpr std::int64_t kMaxRows = 10000000;

struct ParsedNumber {
  double value = 0.0;
  bool reduced = false;  // beyond double range: value is the signed significand
};

/// Plain decimal or scientific notation with an optional sign. Thousands
/// separators, decimal commas, hex, inf and nan are rejected. A literal whose
/// magnitude a double cannot hold (e.g. a 1000-digit integer) comes back as its
/// signed significand read from the digits, which keeps every digit statistic.
inline std::optional<ParsedNumber> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') ++i;
  std::string mantissa;  // significant digits with leading zeros dropped
  std::size_t int_digits = 0, frac_digits = 0;
  const auto take = [&](char c) {
    if (!(mantissa.empty() && c == '0') && mantissa.size() < 40) mantissa += c;
  };
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') take(s[i++]), ++int_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') take(s[i++]), ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;
  const bool negative = s.front() == '-';
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && p == s.data() + s.size() && std::isfinite(v) && (v != 0.0 || mantissa.empty())) {
    return ParsedNumber{v, false};
  }
  if (ec != std::errc() && ec != std::errc::result_out_of_range) return std::nullopt;
  if (mantissa.empty()) return ParsedNumber{0.0, false};
  const std::string sig = mantissa.substr(0, 1) + "." + mantissa.substr(1);
  double m = 0.0;
  std::from_chars(sig.data(), sig.data() + sig.size(), m);
  if (m >= 10.0) m = std::nextafter(10.0, 0.0);
  return ParsedNumber{negative ? -m : m, true};
}

enum class InputFormat { Csv, Jsonl };

struct IngestOptions {
  InputFormat format = InputFormat::Csv;
  std::string column;  // CSV header name or 1-based index; JSON-lines key
  bool header = true;
  bool lenient = false;
  double max_bad_fraction = 0.10;
  std::int64_t max_rows = kMaxRows;
};

struct IngestResult {
  std::vector<double> values;
  std::int64_t rows = 0;
  std::int64_t non_numeric = 0;
  std::int64_t reduced = 0;  // values beyond double range kept as significands
  std::string column;  // resolved column name or index
};

/// One CSV record: comma separated, fields optionally double-quoted with "" as an escaped quote.
inline std::vector<std::string> split_csv_record(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !was_quoted && field.find_first_not_of(" \t") == std::string::npos) {
      field.clear();
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

namespace detail {

inline void finish_ingest(IngestResult& r, const IngestOptions& opt) {
  if (r.rows == 0) throw DataError("input has no data rows");
  if (!opt.lenient && static_cast<double>(r.non_numeric) > opt.max_bad_fraction * static_cast<double>(r.rows)) {
    throw DataError(std::to_string(r.non_numeric) + " of " + std::to_string(r.rows) +
                    " rows are not numeric (more than 10%); use --lenient to skip them");
  }
  if (r.values.empty()) throw DataError("no numeric values in the selected column");
}

inline void count_row(IngestResult& r, const IngestOptions& opt) {
  if (++r.rows > opt.max_rows) {
    throw ResourceError("input exceeds the row budget of " + std::to_string(opt.max_rows) + " rows");
  }
}

inline void add_value(IngestResult& r, const std::optional<ParsedNumber>& v) {
  if (!v) {
    ++r.non_numeric;
    return;
  }
  r.values.push_back(v->value);
  if (v->reduced) ++r.reduced;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0) return std::nullopt;
  return v - 1;
}

}  // namespace detail

inline IngestResult read_csv(std::istream& in, const IngestOptions& opt) {
  IngestResult r;
  std::string line;
  std::optional<std::size_t> col;
  if (opt.header) {
    if (!std::getline(in, line)) throw DataError("input is empty");
    const auto names = split_csv_record(line);
    for (std::size_t i = 0; i < names.size() && !col; ++i) {
      if (names[i] == opt.column) col = i;
    }
    if (!col && opt.column.empty() && names.size() == 1) col = 0;
    if (!col) col = detail::parse_index(opt.column);
    if (!col) throw DataError("no column '" + opt.column + "' in the header");
    r.column = *col < names.size() ? names[*col] : std::to_string(*col + 1);
  } else {
    col = opt.column.empty() ? std::optional<std::size_t>(0) : detail::parse_index(opt.column);
    if (!col) throw DataError("without a header the column must be a 1-based index");
    r.column = std::to_string(*col + 1);
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    detail::count_row(r, opt);
    const auto fields = split_csv_record(line);
    detail::add_value(r, *col < fields.size() ? parse_number(fields[*col]) : std::nullopt);
  }
  detail::finish_ingest(r, opt);
  return r;
}

/// One JSON object per line; the field may hold a number or a numeric string.
inline IngestResult read_jsonl(std::istream& in, const IngestOptions& opt) {
  if (opt.column.empty()) throw DataError("JSON-lines input needs a field name");
  IngestResult r;
  r.column = opt.column;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    detail::count_row(r, opt);
    const auto j = nlohmann::json::parse(line, nullptr, false);
    std::optional<ParsedNumber> v;
    if (j.is_object()) {
      const auto it = j.find(opt.column);
      if (it != j.end() && it->is_number()) {
        const double x = it->get<double>();
        if (std::isfinite(x)) v = ParsedNumber{x, false};
      } else if (it != j.end() && it->is_string()) {
        v = parse_number(it->get<std::string>());
      }
    }
    detail::add_value(r, v);
  }
  detail::finish_ingest(r, opt);
  return r;
}

inline IngestResult ingest(std::istream& in, const IngestOptions& opt) {
  return opt.format == InputFormat::Jsonl ? read_jsonl(in, opt) : read_csv(in, opt);
}

}  // namespace benford
