#pragma once

#include <string>
#include <variant>
#include <vector>

namespace qrev {

// Dataset cell: a double or an explicit sentinel string ("infeasible",
// "divergent"); never NaN, so downstream plotting can tell infeasible from
// failed.
using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

// Doubles with 17 significant digits (round-trip exact), C locale.
std::string format_double(double value);

// CSV with a header row, UTF-8, LF line endings.
std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);

// {"columns": [...], "rows": [[...], ...]} with deterministic serialization.
std::string to_json(const Table& table);

enum class TableFormat { csv, json };

// Writes <dir>/<stem>.csv or .json; returns the path written.
std::string write_table(const Table& table, const std::string& dir, const std::string& stem,
                        TableFormat format);

}  // namespace qrev
