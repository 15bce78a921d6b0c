#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isotree/core.hpp"

namespace isotree::io {

struct CsvOptions {
  bool has_header = false;
  /// Column holding class labels: a header name, or a 0-based index.
  std::optional<std::string> label_column;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": '" + text + "' is not a number");
  }
  return value;
}

inline std::size_t resolve_column(const std::string& spec, const std::vector<std::string>& header, std::size_t columns) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == spec) return i;
  }
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
  if (ec != std::errc{} || ptr != spec.data() + spec.size() || index >= columns) {
    throw std::runtime_error("unknown column '" + spec + "'");
  }
  return index;
}

inline bool blank(std::string_view line) { return trim(line).empty(); }

inline std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return in;
}

}  // namespace detail

/// One point per row, numeric feature columns, optional header and label column.
inline DataSet read_dataset(std::istream& in, const CsvOptions& options = {}) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::vector<std::string> header;
  std::optional<std::size_t> label_index;
  std::size_t columns = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    auto cells = detail::split(line);
    if (header_pending) {
      header = std::move(cells);
      header_pending = false;
      continue;
    }
    if (columns == 0) {
      columns = cells.size();
      if (options.label_column) label_index = detail::resolve_column(*options.label_column, header, columns);
    }
    if (cells.size() != columns) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns, got " +
                               std::to_string(cells.size()));
    }
    auto& row = rows.emplace_back();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (label_index && c == *label_index) {
        labels.push_back(cells[c]);
      } else {
        row.push_back(detail::parse_double(cells[c], line_no));
      }
    }
  }
  if (rows.empty()) throw std::runtime_error("no points");
  if (label_index) return DataSet(std::move(rows), std::move(labels));
  return DataSet(std::move(rows));
}

inline DataSet read_dataset(const std::string& path, const CsvOptions& options = {}) {
  auto in = detail::open(path);
  return read_dataset(in, options);
}

/// `index,cluster` rows; -1 marks residue.
inline void write_labels(std::ostream& out, const std::vector<int>& labels) {
  out << "index,cluster\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

inline void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_labels(out, labels);
}

/// Reads one column (by header name or index) of a headed CSV as strings.
inline std::vector<std::string> read_column(std::istream& in, const std::string& column) {
  std::string line;
  std::vector<std::string> header;
  std::vector<std::string> out;
  std::optional<std::size_t> index;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    auto cells = detail::split(line);
    if (header.empty()) {
      header = std::move(cells);
      index = detail::resolve_column(column, header, header.size());
      continue;
    }
    if (*index >= cells.size()) throw std::runtime_error("line " + std::to_string(line_no) + ": missing column '" + column + "'");
    out.push_back(cells[*index]);
  }
  return out;
}

inline std::vector<std::string> read_column(const std::string& path, const std::string& column) {
  auto in = detail::open(path);
  return read_column(in, column);
}

inline std::vector<int> read_labels(std::istream& in) {
  std::vector<int> out;
  for (const auto& cell : read_column(in, "cluster")) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw std::runtime_error("bad cluster id '" + cell + "'");
    out.push_back(value);
  }
  return out;
}

inline std::vector<int> read_labels(const std::string& path) {
  auto in = detail::open(path);
  return read_labels(in);
}

}  // namespace isotree::io
