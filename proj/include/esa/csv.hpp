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

// CSV output with a versioned schema line ("#schema=esa.<name>.v1") ahead
// of the header row.

#ifndef ESA_CSV_HPP_
#define ESA_CSV_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace esa {

class CsvWriter {
 public:
  CsvWriter(std::string_view schema_name, std::vector<std::string> header);

  // Throws std::invalid_argument when the width differs from the header.
  CsvWriter& row(const std::vector<std::string>& fields);
  std::string str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

std::string csv_escape(std::string_view field);
// Shortest round-trip form; absent values are empty fields.
std::string csv_number(double v);
std::string csv_number(std::optional<double> v);

// Rows of a document written by CsvWriter, schema line and header
// excluded. Quoted fields are unescaped.
struct CsvTable {
  std::string schema;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 when absent
};
CsvTable parse_csv(std::string_view text);

}  // namespace esa

#endif  // ESA_CSV_HPP_
