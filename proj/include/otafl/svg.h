// Copyright 2026 The OTAFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OTAFL_SVG_H_
#define OTAFL_SVG_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace otafl::expcli {

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ChartError naming the column when absent.
  int column_index(const std::string& name) const;
  // Non-numeric cells become NaN.
  std::vector<double> column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

struct ChartSpec {
  std::string title;
  std::string x_column;
  std::vector<std::string> y_columns;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

// One <polyline> per y column. Points that are non-finite, or non-positive
// on a log axis, are skipped.
std::string render_svg(const CsvTable& table, const ChartSpec& spec);

// Reads `csv_path` and writes the chart to `svg_path`. Nothing is written
// when the table has no rows or a column is missing.
void emit_svg(const std::string& csv_path, const ChartSpec& spec,
              const std::string& svg_path);

// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace otafl::expcli

#endif  // OTAFL_SVG_H_
