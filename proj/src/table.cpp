#include "qrev/table.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qrev {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("Table::add_row: row width does not match header");
  rows.push_back(std::move(row));
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (std::holds_alternative<double>(row[c]))
        out += format_double(std::get<double>(row[c]));
      else
        out += std::get<std::string>(row[c]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

Cell parse_cell(const std::string& field) {
  if (!field.empty()) {
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str() + field.size()) return value;
  }
  return field;
}

}  // namespace

Table parse_csv(const std::string& text) {
  Table table;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    if (header) {
      table.columns = split_line(line);
      header = false;
      continue;
    }
    std::vector<Cell> row;
    for (const auto& field : split_line(line)) row.push_back(parse_cell(field));
    table.add_row(std::move(row));
  }
  return table;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json j;
  j["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (std::holds_alternative<double>(cell))
        jrow.push_back(std::get<double>(cell));
      else
        jrow.push_back(std::get<std::string>(cell));
    }
    rows.push_back(std::move(jrow));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string write_table(const Table& table, const std::string& dir, const std::string& stem,
                        TableFormat format) {
  namespace fs = std::filesystem;
  const fs::path path =
      fs::path(dir) / (stem + (format == TableFormat::csv ? ".csv" : ".json"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_table: cannot open '" + path.string() + "'");
  out << (format == TableFormat::csv ? to_csv(table) : to_json(table));
  if (!out) throw std::runtime_error("write_table: write failed for '" + path.string() + "'");
  return path.string();
}

}  // namespace qrev
