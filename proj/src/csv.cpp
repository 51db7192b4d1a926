// Copyright 2026 The ESA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "esa/csv.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace esa {

CsvWriter::CsvWriter(std::string_view schema_name, std::vector<std::string> header)
    : width_(header.size()) {
  out_ = fmt::format("#schema=esa.{}.v1\n", schema_name);
  row(header);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) {
    throw std::invalid_argument(
        fmt::format("csv row has {} fields, header has {}", fields.size(), width_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_escape(fields[i]);
  }
  out_ += '\n';
  return *this;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  return fmt::format("{}", v);
}

std::string csv_number(std::optional<double> v) {
  return v ? csv_number(*v) : std::string();
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted csv field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }

  CsvTable t;
  std::size_t next = 0;
  if (next < records.size() && records[next].size() == 1 &&
      records[next][0].rfind("#schema=", 0) == 0) {
    t.schema = records[next][0].substr(8);
    ++next;
  }
  if (next < records.size()) t.header = std::move(records[next++]);
  for (; next < records.size(); ++next) t.rows.push_back(std::move(records[next]));
  return t;
}

}  // namespace esa
