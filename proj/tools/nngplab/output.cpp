#include "output.hpp"

#include <cmath>
#include <cstdio>

namespace nngp::app {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& comment,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
  if (!out_) throw ConfigError("cannot open output file " + path.string());
  out_ << comment << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CSV row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>)
            out_ << format_double(v);
          else
            out_ << v;
        },
        cells[i]);
  }
  out_ << '\n';
}

std::string header_comment(const std::string& command, const json& effective) {
  return "# nngplab " NNGPLAB_VERSION " command=" + command + " config_hash=" + config_hash(effective);
}

void write_json(const std::filesystem::path& path, const std::string& command, const json& effective, json body) {
  body["_meta"] = {{"version", NNGPLAB_VERSION}, {"command", command}, {"config_hash", config_hash(effective)},
                   {"config", effective}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << body.dump(2) << '\n';
}

}  // namespace nngp::app
