/*
 * Copyright 2026 The agr-cbr Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "agr/case_base.hpp"
#include "agr/error.hpp"
#include "agr/model.hpp"

namespace agr {

namespace csv {

inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

inline std::string escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Shortest representation that parses back to the same double.
inline std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
  double x = 0.0;
  if (s.empty()) return std::nullopt;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(x))
    return std::nullopt;
  return x;
}

inline std::optional<CaseId> parse_id(std::string_view s) {
  CaseId x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

}  // namespace csv

inline std::vector<std::string> csv_header(const FeatureSchema& schema) {
  std::vector<std::string> h{"id"};
  for (const Feature& f : schema.features()) h.push_back(f.name);
  h.insert(h.end(), {"Hotel", "HotelCategory", "HotelLocation"});
  return h;
}

struct CsvReport {
  std::optional<CaseBase> cases;
  std::vector<std::string> errors;  // one entry per offending row
};

// Parses every row, collecting row-numbered diagnostics instead of
// stopping at the first failure. Row numbers count data rows from 1.
inline CsvReport read_csv(std::istream& in, const FeatureSchema& schema) {
  CsvReport report;
  const auto header = csv_header(schema);
  std::string line;
  if (!std::getline(in, line)) {
    report.errors.push_back("empty file: missing header row");
    return report;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (csv::split_line(line) != header) {
    std::string expected;
    for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
    report.errors.push_back("header mismatch: expected " + expected);
    return report;
  }

  const std::size_t nf = schema.size();
  std::vector<Case> cases;
  std::unordered_map<CaseId, std::size_t> seen;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::string where = "row " + std::to_string(row);
    const auto cells = csv::split_line(line);
    if (cells.size() != header.size()) {
      report.errors.push_back(where + ": expected " + std::to_string(header.size()) +
                              " columns, got " + std::to_string(cells.size()));
      continue;
    }
    Case c;
    std::string error;
    if (auto id = csv::parse_id(cells[0])) {
      c.id = *id;
    } else {
      error = where + ", column id: malformed integer '" + cells[0] + "'";
    }
    c.values.resize(nf);
    for (std::size_t i = 0; i < nf && error.empty(); ++i) {
      const std::string& cell = cells[i + 1];
      if (cell.empty()) continue;  // Missing
      if (schema[i].kind.is_label()) {
        c.values[i] = cell;
      } else if (auto x = csv::parse_number(cell)) {
        c.values[i] = *x;
      } else {
        error = where + ", column " + schema[i].name + ": malformed number '" + cell + "'";
      }
    }
    if (error.empty()) {
      c.hotel.name = cells[nf + 1];
      const std::string& cat = cells[nf + 2];
      auto x = csv::parse_number(cat);
      if (!x || *x != static_cast<int>(*x)) {
        error = where + ", column HotelCategory: malformed integer '" + cat + "'";
      } else {
        c.hotel.category = static_cast<int>(*x);
      }
      c.hotel.location = cells[nf + 3];
    }
    if (error.empty()) {
      if (auto why = case_violation(schema, c); !why.empty()) error = where + ": " + why;
    }
    if (error.empty()) {
      if (auto [it, fresh] = seen.emplace(c.id, row); !fresh)
        error = where + ": duplicate id " + std::to_string(c.id) + " (first seen in row " +
                std::to_string(it->second) + ")";
    }
    if (!error.empty()) {
      report.errors.push_back(std::move(error));
      continue;
    }
    cases.push_back(std::move(c));
  }
  if (!report.errors.empty()) return report;
  if (cases.empty()) {
    report.errors.push_back("no data rows");
    return report;
  }
  CaseBase cb(schema, std::move(cases));
  if (!cb.ids_dense()) {
    report.errors.push_back("case ids are not a contiguous range");
    return report;
  }
  report.cases = std::move(cb);
  return report;
}

inline CaseBase load_csv(std::istream& in, const FeatureSchema& schema) {
  CsvReport report = read_csv(in, schema);
  if (!report.errors.empty()) {
    std::string msg = report.errors.front();
    if (report.errors.size() > 1)
      msg += " (and " + std::to_string(report.errors.size() - 1) + " more)";
    throw DataError(msg);
  }
  return std::move(*report.cases);
}

inline CaseBase load_csv(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_csv(in, schema);
}

inline std::string format_value(const FeatureValue& v) {
  if (const auto* x = std::get_if<double>(&v)) return csv::format_number(*x);
  if (const auto* s = std::get_if<std::string>(&v)) return csv::escape(*s);
  return {};
}

// Canonical formatting: cases in id order, shortest round-trip numbers,
// empty cells for missing values, '\n' line endings.
inline void write_csv(std::ostream& out, const CaseBase& cb) {
  const auto header = csv_header(cb.schema());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const Case& c : cb.cases()) {
    out << c.id;
    for (const FeatureValue& v : c.values) out << ',' << format_value(v);
    out << ',' << csv::escape(c.hotel.name) << ',' << c.hotel.category << ','
        << csv::escape(c.hotel.location) << '\n';
  }
}

inline void write_csv(const std::string& path, const CaseBase& cb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, cb);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace agr
