#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "nngplab/error.hpp"

namespace nngp::app {

using json = nlohmann::json;

class ConfigError : public DomainError {
 public:
  explicit ConfigError(const std::string& what) : DomainError(what) {}
};

enum class FieldKind { integer, number, string, boolean, int_list, string_list, matrix, int_or_string };

struct Field {
  std::string name;
  FieldKind kind;
  json fallback;
  std::string help;
};

const std::vector<std::string>& command_names();
const std::vector<Field>& schema(const std::string& command);

// Merges defaults, rejects unknown keys and mistyped values.
json validate(const std::string& command, const json& user);

// Parses a flag value for a field: JSON if it parses, with bare
// comma-separated lists and bare strings accepted.
json parse_flag_value(const Field& field, const std::string& text);

// FNV-1a over the canonical dump of the effective config.
std::string config_hash(const json& effective);

std::uint64_t default_seed();

}  // namespace nngp::app
