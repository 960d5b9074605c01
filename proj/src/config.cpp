#include "splinenoise/config.hpp"

#include <fstream>
#include <set>

namespace splinenoise {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

const json& require_key(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) fail("missing required key '" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail("'" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> parse_grid(const json& v, const std::string& key) {
  std::vector<double> grid;
  if (v.is_array()) {
    for (const auto& item : v) grid.push_back(as_number(item, key));
  } else if (v.is_object()) {
    for (const auto& [k, unused] : v.items()) {
      if (k != "start" && k != "stop" && k != "count") {
        fail("'" + key + "' grid object permits only start/stop/count");
      }
    }
    const double start = as_number(require_key(v, "start"), key + ".start");
    const double stop = as_number(require_key(v, "stop"), key + ".stop");
    const int count = as_int(require_key(v, "count"), key + ".count");
    if (count < 1) fail("'" + key + ".count' must be >= 1");
    if (count == 1) {
      if (start != stop) fail("'" + key + "': count 1 requires start == stop");
      grid.push_back(start);
    } else {
      grid.resize(count);
      for (int i = 0; i < count; ++i) {
        grid[i] = start + (stop - start) * static_cast<double>(i) /
                              static_cast<double>(count - 1);
      }
      grid.back() = stop;
    }
  } else {
    fail("'" + key + "' must be an array or a start/stop/count object");
  }
  if (grid.empty()) fail("'" + key + "' must be non-empty");
  return grid;
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) fail("top-level value must be an object");
  if (j.contains("config")) return parse_config(j.at("config"));

  static const std::set<std::string> known = {
      "K", "j", "I", "n", "a", "b", "lambda_grid", "sigma_grid",
      "trials", "seed", "weight_mode"};
  for (const auto& [key, unused] : j.items()) {
    if (!known.count(key)) fail("unknown key '" + key + "'");
  }

  ExperimentConfig c;
  c.K = as_int(require_key(j, "K"), "K");
  c.j = as_int(require_key(j, "j"), "j");
  c.strong_index = as_int(require_key(j, "I"), "I");
  c.n = as_int(require_key(j, "n"), "n");
  c.a = as_number(require_key(j, "a"), "a");
  c.b = as_number(require_key(j, "b"), "b");
  c.lambda_grid = parse_grid(require_key(j, "lambda_grid"), "lambda_grid");
  c.sigma_grid = parse_grid(require_key(j, "sigma_grid"), "sigma_grid");
  c.trials = as_int(require_key(j, "trials"), "trials");
  const json& seed = require_key(j, "seed");
  if (!seed.is_number_unsigned() &&
      !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    fail("'seed' must be a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  const json& mode = require_key(j, "weight_mode");
  if (!mode.is_string()) fail("'weight_mode' must be a string");
  c.weight_mode = weight_mode_from_string(mode.get<std::string>());
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail("JSON parse error in '" + path.string() + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["K"] = config.K;
  j["j"] = config.j;
  j["I"] = config.strong_index;
  j["n"] = config.n;
  j["a"] = config.a;
  j["b"] = config.b;
  j["lambda_grid"] = config.lambda_grid;
  j["sigma_grid"] = config.sigma_grid;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["weight_mode"] = to_string(config.weight_mode);
  return j;
}

}  // namespace splinenoise
