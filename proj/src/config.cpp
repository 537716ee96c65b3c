#include "ecomp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ecomp/decomposition.hpp"

namespace ecomp {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& key, const std::string& what) {
  fail(ErrorCode::kConfigParse, "config key '" + key + "': " + what);
}

double number_at(const json& node, const std::string& key) {
  if (node.is_string()) {
    try {
      return parse_decimal(node.get<std::string>());
    } catch (const Error& e) {
      schema_error(key, e.what());
    }
  }
  if (node.is_number()) return node.get<double>();
  schema_error(key, "expected a decimal string or a number");
}

std::int64_t integer_at(const json& node, const std::string& key) {
  if (node.is_number_integer()) return node.get<std::int64_t>();
  if (node.is_string()) {
    const std::string text = node.get<std::string>();
    std::int64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && end == text.data() + text.size()) return value;
  }
  schema_error(key, "expected an integer");
}

std::uint64_t unsigned_at(const json& node, const std::string& key) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (node.is_string()) {
    const std::string text = node.get<std::string>();
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && end == text.data() + text.size()) return value;
  }
  schema_error(key, "expected a non-negative integer");
}

int positive_int_at(const json& node, const std::string& key) {
  const std::int64_t v = integer_at(node, key);
  if (v < 1 || v > std::numeric_limits<int>::max()) schema_error(key, "must be a positive int");
  return static_cast<int>(v);
}

std::vector<double> number_list(const json& node, const std::string& key) {
  if (!node.is_array()) schema_error(key, "expected a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(number_at(node[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

double parse_decimal(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    fail(ErrorCode::kConfigParse, "not a finite decimal: '" + std::string(text) + "'");
  }
  return value;
}

InstanceConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "malformed JSON at byte " << e.byte << ": " << e.what();
    fail(ErrorCode::kConfigParse, msg.str());
  }
  if (!doc.is_object()) fail(ErrorCode::kConfigParse, "config must be a JSON object");

  static const char* const kKnown[] = {"items", "n", "epsilon", "n_prime", "n_prime_factor", "mode",
                                       "samples", "seed", "tolerance", "caps"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      schema_error(key, "unknown key");
    }
  }

  InstanceConfig config;
  if (!doc.contains("items") || !doc["items"].is_array() || doc["items"].empty()) {
    schema_error("items", "expected a non-empty list of items");
  }
  for (std::size_t j = 0; j < doc["items"].size(); ++j) {
    const json& item = doc["items"][j];
    const std::string key = "items[" + std::to_string(j) + "]";
    if (!item.is_object() || !item.contains("values") || !item.contains("probs")) {
      schema_error(key, "expected an object with 'values' and 'probs'");
    }
    config.items.push_back({number_list(item["values"], key + ".values"),
                            number_list(item["probs"], key + ".probs")});
  }
  if (doc.contains("n")) config.n = positive_int_at(doc["n"], "n");
  if (doc.contains("epsilon")) {
    config.epsilon = number_at(doc["epsilon"], "epsilon");
    if (!(config.epsilon > 0.0 && config.epsilon <= 1.0)) schema_error("epsilon", "must lie in (0, 1]");
  }
  if (doc.contains("n_prime") && !doc["n_prime"].is_null()) {
    config.n_prime = positive_int_at(doc["n_prime"], "n_prime");
  }
  if (doc.contains("n_prime_factor")) {
    config.n_prime_factor = number_at(doc["n_prime_factor"], "n_prime_factor");
    if (!(config.n_prime_factor > 0.0)) schema_error("n_prime_factor", "must be positive");
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) schema_error("mode", "expected a string");
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "exact") {
      config.mode = RunMode::kExact;
    } else if (mode == "monte_carlo" || mode == "mc") {
      config.mode = RunMode::kMonteCarlo;
    } else {
      schema_error("mode", "expected 'exact' or 'monte_carlo'");
    }
  }
  if (doc.contains("samples")) {
    config.samples = unsigned_at(doc["samples"], "samples");
    if (config.samples == 0) schema_error("samples", "must be positive");
  }
  if (doc.contains("seed")) config.seed = unsigned_at(doc["seed"], "seed");
  if (doc.contains("tolerance")) {
    config.tolerance = number_at(doc["tolerance"], "tolerance");
    if (!(config.tolerance >= 0.0)) schema_error("tolerance", "must be non-negative");
  }
  if (doc.contains("caps")) {
    const json& caps = doc["caps"];
    if (!caps.is_object()) schema_error("caps", "expected an object");
    for (const auto& [key, value] : caps.items()) {
      const std::string path = "caps." + key;
      if (key == "max_valuations") {
        config.caps.max_valuations = unsigned_at(value, path);
      } else if (key == "max_joint_terms") {
        config.caps.max_joint_terms = unsigned_at(value, path);
      } else if (key == "max_n_prime") {
        config.caps.max_n_prime = positive_int_at(value, path);
      } else {
        schema_error(path, "unknown key");
      }
    }
  }
  if (config.n_prime && *config.n_prime < config.n) schema_error("n_prime", "must be at least n");
  return config;
}

InstanceConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kConfigParse, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

AuctionSetting InstanceConfig::setting() const {
  std::vector<ItemDistribution> dists;
  for (const auto& item : items) dists.push_back(make_item_distribution(item.values, item.probs));
  const int np = resolved_n_prime();
  return AuctionSetting(std::move(dists), n, np, epsilon, caps);
}

int InstanceConfig::resolved_n_prime() const {
  return n_prime ? *n_prime : default_n_prime(n, epsilon, n_prime_factor);
}

std::string_view to_string(RunMode mode) {
  return mode == RunMode::kExact ? "exact" : "monte_carlo";
}

}  // namespace ecomp
