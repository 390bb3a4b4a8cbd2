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

#include "otafl/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace otafl::expcli {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw ChartError("missing column '" + name + "'");
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto idx = static_cast<std::size_t>(column_index(name));
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    double v = std::numeric_limits<double>::quiet_NaN();
    if (idx < row.size() && !row[idx].empty()) {
      char* end = nullptr;
      const double parsed = std::strtod(row[idx].c_str(), &end);
      if (end != nullptr && *end == '\0') v = parsed;
    }
    out.push_back(v);
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      table.header = split_line(line);
      first = false;
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ChartError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string render_svg(const CsvTable& table, const ChartSpec& spec) {
  if (table.rows.empty()) throw ChartError("empty CSV: no data rows");
  if (spec.y_columns.empty()) throw ChartError("chart needs at least one y column");
  const std::vector<double> xs = table.column(spec.x_column);
  std::vector<std::vector<double>> ys;
  for (const auto& name : spec.y_columns) ys.push_back(table.column(name));

  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) &&
           (!spec.log_y || y > 0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& series : ys) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!usable(xs[i], series[i])) continue;
      x0 = std::min(x0, tx(xs[i]));
      x1 = std::max(x1, tx(xs[i]));
      y0 = std::min(y0, ty(series[i]));
      y1 = std::max(y1, ty(series[i]));
    }
  }
  if (!std::isfinite(x0)) throw ChartError("no plottable points");
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
      << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width << ' '
      << spec.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(left) << "\" y=\"24\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << escape_xml(spec.title) << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  auto axis_label = [](double v, bool log_axis) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", log_axis ? std::pow(10.0, v) : v);
    return std::string(buf);
  };
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    svg << "<text x=\"" << num(left + pw * k / 4.0) << "\" y=\"" << num(top + ph + 18)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
        << axis_label(fx, spec.log_x) << "</text>\n";
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + ph * (1 - k / 4.0) + 3)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
        << axis_label(fy, spec.log_y) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(spec.height - 10.0)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
      << escape_xml(spec.x_column) << (spec.log_x ? " (log)" : "") << "</text>\n";

  for (std::size_t s = 0; s < ys.size(); ++s) {
    const char* colour = kPalette[s % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!usable(xs[i], ys[s][i])) continue;
      svg << (first ? "" : " ") << num(px(xs[i])) << ',' << num(py(ys[s][i]));
      first = false;
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << num(left + 8) << "\" y=\"" << num(top + 14.0 + 14.0 * s)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colour << "\">"
        << escape_xml(spec.y_columns[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg(const std::string& csv_path, const ChartSpec& spec,
              const std::string& svg_path) {
  const std::string svg = render_svg(read_csv(csv_path), spec);
  write_file_atomic(svg_path, svg);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace otafl::expcli
