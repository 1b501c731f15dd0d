#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsvf/cli/config.hpp"

namespace tsvf::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct FileRecord {
  std::filesystem::path path;
  std::size_t rows = 0;
  std::vector<std::string> columns;
};

struct RunReport {
  std::vector<FileRecord> files_written;
  std::vector<std::string> warnings;
};

enum class RunKind { simulate, sweep };

/// Runs every configured mode and writes one CSV per mode plus
/// manifest.json into config.output_dir. Integration failures propagate as
/// IntegrationDiverged.
RunReport run(const RunConfig& config, RunKind kind = RunKind::simulate);

/// Semantic checks that depend on the run kind (sweep needs a [sweep]
/// table and sweepable modes).
std::vector<Diagnostic> check_runnable(const RunConfig& config, RunKind kind);

}  // namespace tsvf::cli
