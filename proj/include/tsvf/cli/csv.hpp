#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace tsvf::cli {

/// Shortest round-trip-safe form is not used on purpose: every value gets
/// 17 significant digits so output bytes depend only on the value.
std::string format_number(double value);

using CsvRow = std::vector<std::string>;

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<CsvRow> rows;

  void add(CsvRow row);
};

/// Streams rows to disk; the header is written on construction.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);

  void row(const CsvRow& cells);
  std::size_t rows() const { return rows_; }
  const std::vector<std::string>& columns() const { return columns_; }
  /// Flushes and throws if any write failed.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<std::string> columns_;
  std::size_t rows_ = 0;
};

/// Writes header plus rows with '\n' line endings. Returns the row count.
std::size_t write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Minimal reader for files written by write_csv (no quoting).
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace tsvf::cli
