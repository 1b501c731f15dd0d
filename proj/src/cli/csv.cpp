#include "tsvf/cli/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsvf::cli {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void CsvTable::add(CsvRow row) {
  if (row.size() != columns.size()) throw std::logic_error("csv row width differs from header");
  rows.push_back(std::move(row));
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.put(',');
    out << cells[i];
  }
  out.put('\n');
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(std::move(columns)) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  write_line(out_, columns_);
}

void CsvWriter::row(const CsvRow& cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("csv row width differs from header");
  write_line(out_, cells);
  ++rows_;
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
  out_.close();
}

std::size_t write_csv(const std::filesystem::path& path, const CsvTable& table) {
  CsvWriter w(path, table.columns);
  for (const auto& row : table.rows) w.row(row);
  w.close();
  return w.rows();
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  table.columns = split(line);
  while (std::getline(in, line)) table.rows.push_back(split(line));
  return table;
}

}  // namespace tsvf::cli
