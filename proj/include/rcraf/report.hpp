// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RCRAF_REPORT_HPP_
#define RCRAF_REPORT_HPP_

// Tabular results written as CSV or JSON with stable column order and
// 17-significant-digit reals.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rcraf {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Throws std::invalid_argument if the row width differs from columns.
  void add_row(std::vector<Cell> row);
};

enum class ReportFormat { kCsv, kJson };

// %.17g, with "nan"/"inf"/"-inf" for non-finite values.
std::string format_real(double v);

std::string to_csv(const Table& table);
// Array of objects, keys in column order; empty cells and non-finite reals
// become null.
std::string to_json(const Table& table);

// Throws std::runtime_error on IO failure.
void write_report(const Table& table, const std::filesystem::path& path, ReportFormat format);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace rcraf

#endif  // RCRAF_REPORT_HPP_
