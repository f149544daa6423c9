#pragma once

// Tabular output shared by all CLI commands.
//
// CSV: '#'-prefixed "key: value" metadata lines, one column-name row, data
// rows; ',' separator, '.' decimal point, LF line ends, numbers in
// scientific notation with a fixed number of significant digits.
// JSON: {"schema_version": "1", "command", "metadata": {...},
//        "columns": [...], "data": [[...], ...]}, NaN written as null.

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace muskat::io {

using MetaValue = std::variant<double, long long, std::string>;

struct Table {
  std::string command;
  std::vector<std::pair<std::string, MetaValue>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void meta(std::string key, MetaValue v) { metadata.emplace_back(std::move(key), std::move(v)); }

  const MetaValue* find(const std::string& key) const {
    for (const auto& [k, v] : metadata) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  double meta_number(const std::string& key) const {
    const MetaValue* v = find(key);
    if (v == nullptr) throw std::out_of_range("missing metadata key: " + key);
    if (const auto* d = std::get_if<double>(v)) return *d;
    if (const auto* i = std::get_if<long long>(v)) return static_cast<double>(*i);
    return std::stod(std::get<std::string>(*v));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::out_of_range("missing column: " + name);
  }
};

inline std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", precision - 1, v);
  return buf;
}

inline std::string format_meta(const MetaValue& v, int precision) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d, precision);
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

inline void write_csv(std::ostream& os, const Table& t, int precision = 17) {
  os << "# command: " << t.command << '\n';
  for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << format_meta(v, precision) << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i], precision);
    os << '\n';
  }
}

namespace detail {
inline nlohmann::ordered_json rounded(double v, int precision) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v, precision));
}
}  // namespace detail

inline void write_json(std::ostream& os, const Table& t, int precision = 17) {
  nlohmann::ordered_json j;
  j["schema_version"] = "1";
  j["command"] = t.command;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.metadata) {
    if (const auto* d = std::get_if<double>(&v)) meta[k] = detail::rounded(*d, precision);
    else if (const auto* i = std::get_if<long long>(&v)) meta[k] = *i;
    else meta[k] = std::get<std::string>(v);
  }
  j["metadata"] = std::move(meta);
  j["columns"] = t.columns;
  nlohmann::ordered_json data = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (double v : row) r.push_back(detail::rounded(v, precision));
    data.push_back(std::move(r));
  }
  j["data"] = std::move(data);
  os << j.dump(2) << '\n';
}

inline double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

/// Reads a table written by write_csv. Metadata values that parse as numbers
/// are returned as doubles, everything else as strings.
inline Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      std::string key = line.substr(2, colon - 2);
      std::string val = line.substr(colon + 2);
      if (key == "command") {
        t.command = val;
        continue;
      }
      try {
        t.meta(key, parse_number(val));
      } catch (const std::exception&) {
        t.meta(key, val);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      t.columns = cells;
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c));
    if (row.size() != t.columns.size()) throw std::runtime_error("csv row width mismatch");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table read_json(std::istream& is) {
  const auto j = nlohmann::ordered_json::parse(is);
  if (j.at("schema_version") != "1") throw std::runtime_error("unsupported schema version");
  Table t;
  t.command = j.at("command").get<std::string>();
  for (const auto& [k, v] : j.at("metadata").items()) {
    if (v.is_number_integer()) t.meta(k, v.get<long long>());
    else if (v.is_number()) t.meta(k, v.get<double>());
    else if (v.is_null()) t.meta(k, std::nan(""));
    else t.meta(k, v.get<std::string>());
  }
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("data")) {
    std::vector<double> row;
    for (const auto& v : r) row.push_back(v.is_null() ? std::nan("") : v.get<double>());
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace muskat::io
