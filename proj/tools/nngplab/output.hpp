#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"

namespace nngp::app {

// Round-trip decimal text for a double, independent of the locale.
std::string format_double(double v);

using Cell = std::variant<double, long long, std::string>;

// Comma-separated, LF line endings, one comment line then the header row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& comment, const std::vector<std::string>& columns);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string header_comment(const std::string& command, const json& effective);

// Writes JSON with a "_meta" object carrying version, command and config hash.
void write_json(const std::filesystem::path& path, const std::string& command, const json& effective, json body);

}  // namespace nngp::app
