#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace nngp::app {

struct RunContext {
  std::filesystem::path out_dir = ".";
  bool unsafe_large = false;
  std::ostream* log = nullptr;
};

// Validates `config` for `command`, runs it, writes its files into
// ctx.out_dir and returns the summary document.
json run(const std::string& command, const json& config, const RunContext& ctx);

// Full command-line entry point; returns the process exit code
// (0 success, 2 configuration error, 3 numerical failure).
int main_entry(int argc, char** argv);

}  // namespace nngp::app
