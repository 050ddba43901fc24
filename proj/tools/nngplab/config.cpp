#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace nngp::app {
namespace {

json ints(std::initializer_list<int> v) { return json(std::vector<int>(v)); }
json strs(std::initializer_list<const char*> v) {
  std::vector<std::string> out(v.begin(), v.end());
  return json(out);
}

const std::map<std::string, std::vector<Field>>& schemas() {
  static const std::map<std::string, std::vector<Field>> table = {
      {"kernel-eval",
       {{"kernel", FieldKind::string, "recursion", "recursion | closed_gaussian | closed_cos | closed_sin"},
        {"activation", FieldKind::string, "gaussian", "activation for the recursion kernel"},
        {"a", FieldKind::number, 1.0, "frequency for closed_cos / closed_sin"},
        {"depth", FieldKind::integer, 1, "recursion depth L (0 gives inner products)"},
        {"quad_order", FieldKind::integer, 40, "Gauss-Hermite order per axis"},
        {"points", FieldKind::matrix, json::array(), "input points, one array per point"},
        {"pairs", FieldKind::matrix, json::array(), "index pairs; empty means all i <= j"}}},
      {"funk-hecke",
       {{"activation", FieldKind::string, "gaussian", "activation of the NNGP profile"},
        {"depth", FieldKind::integer, 1, "NNGP depth"},
        {"n", FieldKind::integer, 3, "ambient dimension"},
        {"kmax", FieldKind::integer, 20, "largest order"},
        {"quad_order", FieldKind::integer, 0, "Gauss-Jacobi order, 0 = default per k"}}},
      {"spectrum",
       {{"activation", FieldKind::string, "cos:a=1", "activation"},
        {"n", FieldKind::integer, 3, "ambient dimension"},
        {"N", FieldKind::integer, 4000, "sample points"},
        {"M", FieldKind::integer, 4000, "random features"},
        {"source", FieldKind::string, "empirical", "empirical | funk_hecke"},
        {"kmax", FieldKind::integer, 40, "orders used by the funk_hecke source"},
        {"cut", FieldKind::int_or_string, "plateau", "plateau | fixed prefix length"},
        {"margin", FieldKind::number, 0.15, "classifier margin around the threshold"},
        {"seed", FieldKind::integer, -1, "master seed, -1 = NNGPLAB_SEED"}}},
      {"rate",
       {{"activation", FieldKind::string, "cos:a=1", "activation"},
        {"n", FieldKind::integer, 3, "input dimension"},
        {"hidden", FieldKind::int_list, ints({1}), "widths n_1..n_L"},
        {"T", FieldKind::int_list, ints({64, 128, 256, 512, 1024, 2048, 4096}), "block counts"},
        {"seeds", FieldKind::integer, 5, "repetitions per T"},
        {"centers", FieldKind::integer, 10, "kernel-combo centers"},
        {"n_train", FieldKind::integer, 500, "training points"},
        {"n_test", FieldKind::integer, 5000, "test points"},
        {"estimator", FieldKind::string, "monte_carlo", "monte_carlo | least_squares"},
        {"ridge", FieldKind::number, -1.0, "ridge for least_squares, negative = default"},
        {"seed", FieldKind::integer, -1, "master seed, -1 = NNGPLAB_SEED"}}},
      {"rfm-harmonic",
       {{"activations", FieldKind::string_list, strs({"relu", "clipped_relu", "cos:a=1", "gaussian"}), "activations"},
        {"n", FieldKind::integer, 3, "ambient dimension"},
        {"k", FieldKind::int_list, ints({2, 4, 6}), "harmonic orders"},
        {"T", FieldKind::int_list, ints({4096}), "neuron counts"},
        {"seeds", FieldKind::integer, 3, "repetitions"},
        {"n_train", FieldKind::integer, 10000, "training points"},
        {"n_test", FieldKind::integer, 2000, "test points"},
        {"ridge", FieldKind::number, -1.0, "ridge, negative = default"},
        {"seed", FieldKind::integer, -1, "master seed, -1 = NNGPLAB_SEED"}}},
      {"train",
       {{"activations", FieldKind::string_list, strs({"gaussian", "cos:a=1", "relu"}), "activations"},
        {"n", FieldKind::integer, 3, "ambient dimension"},
        {"k", FieldKind::int_list, ints({6, 10}), "harmonic orders"},
        {"hidden", FieldKind::integer, 1024, "hidden units"},
        {"epochs", FieldKind::integer, 60, "epochs"},
        {"batch_size", FieldKind::integer, 128, "minibatch size"},
        {"lr", FieldKind::number, 0.01, "Adam learning rate"},
        {"seeds", FieldKind::integer, 5, "repetitions averaged into the mean trace"},
        {"n_train", FieldKind::integer, 10000, "training points"},
        {"n_test", FieldKind::integer, 2000, "test points"},
        {"init", FieldKind::string, "standard", "standard | rfm"},
        {"seed", FieldKind::integer, -1, "master seed, -1 = NNGPLAB_SEED"}}},
      {"probe",
       {{"mode", FieldKind::string, "variance", "variance | deviation"},
        {"activation", FieldKind::string, "gaussian", "activation"},
        {"n", FieldKind::integer, 3, "input dimension"},
        {"h", FieldKind::int_list, ints({1, 2, 3}), "variance mode: layers probed"},
        {"widths", FieldKind::int_list, ints({16, 64, 256}), "variance: common width; deviation: n_1 sweep"},
        {"depth", FieldKind::integer, 2, "deviation mode: depth L"},
        {"last_width", FieldKind::integer, 256, "deviation mode: widths of layers 2..L"},
        {"pairs", FieldKind::integer, 5, "deviation mode: point pairs (the first is x = y)"},
        {"repetitions", FieldKind::integer, 2000, "independent weight draws"},
        {"seed", FieldKind::integer, -1, "master seed, -1 = NNGPLAB_SEED"}}},
  };
  return table;
}

bool matches(FieldKind kind, const json& v) {
  auto all = [&](auto pred) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
      if (!pred(e)) return false;
    return true;
  };
  switch (kind) {
    case FieldKind::integer: return v.is_number_integer();
    case FieldKind::number: return v.is_number();
    case FieldKind::string: return v.is_string();
    case FieldKind::boolean: return v.is_boolean();
    case FieldKind::int_list: return all([](const json& e) { return e.is_number_integer(); });
    case FieldKind::string_list: return all([](const json& e) { return e.is_string(); });
    case FieldKind::matrix:
      return all([](const json& row) {
        if (!row.is_array()) return false;
        for (const auto& e : row)
          if (!e.is_number()) return false;
        return true;
      });
    case FieldKind::int_or_string: return v.is_number_integer() || v.is_string();
  }
  return false;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"kernel-eval", "spectrum", "rate", "rfm-harmonic",
                                                 "train",       "probe",    "funk-hecke"};
  return names;
}

const std::vector<Field>& schema(const std::string& command) {
  auto it = schemas().find(command);
  if (it == schemas().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

json validate(const std::string& command, const json& user) {
  const auto& fields = schema(command);
  if (!user.is_null() && !user.is_object()) throw ConfigError("config must be a JSON object");
  json out = json::object();
  for (const auto& f : fields) out[f.name] = f.fallback;
  if (user.is_object()) {
    for (const auto& [key, value] : user.items()) {
      auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.name == key; });
      if (it == fields.end()) throw ConfigError("unknown config field '" + key + "' for " + command);
      if (!matches(it->kind, value)) throw ConfigError("config field '" + key + "' has the wrong type");
      out[key] = value;
    }
  }
  return out;
}

json parse_flag_value(const Field& field, const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (!v.is_discarded() && matches(field.kind, v)) return v;
  const bool list = field.kind == FieldKind::int_list || field.kind == FieldKind::string_list;
  if (list) {
    json arr = json::array();
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (field.kind == FieldKind::int_list) {
        json e = json::parse(item, nullptr, false);
        if (e.is_discarded() || !e.is_number_integer())
          throw ConfigError("flag --" + field.name + " expects integers, got '" + item + "'");
        arr.push_back(e);
      } else {
        arr.push_back(item);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return arr;
  }
  if (field.kind == FieldKind::string || field.kind == FieldKind::int_or_string) return text;
  throw ConfigError("flag --" + field.name + " has an invalid value '" + text + "'");
}

std::string config_hash(const json& effective) {
  const std::string dump = effective.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t default_seed() {
  const char* v = std::getenv("NNGPLAB_SEED");
  if (v == nullptr || *v == '\0') return 20240501;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0') throw ConfigError("NNGPLAB_SEED must be a nonnegative integer");
  return s;
}

}  // namespace nngp::app
