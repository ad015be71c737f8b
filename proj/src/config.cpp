#include "vibemoji/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vibemoji {

using nlohmann::json;

ServerConfig parse_server_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");

  ServerConfig cfg;
  std::vector<std::string> problems;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  auto string_field = [&](const char* key, bool required) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) {
      if (required) problems.push_back(std::string(key) + ": required string");
      return std::nullopt;
    }
    if (!j[key].is_string()) {
      problems.push_back(std::string(key) + ": must be a string");
      return std::nullopt;
    }
    return j[key].get<std::string>();
  };

  if (auto v = string_field("listen", false)) cfg.listen_address = *v;
  cfg.http_address = string_field("http", false);
  if (auto v = string_field("catalog", true)) cfg.catalog_path = resolve(*v);
  if (auto v = string_field("data_dir", true)) cfg.data_dir = resolve(*v);
  cfg.webhook_url = string_field("webhook_url", false);
  for (const char* key : {"alpha", "beta"}) {
    if (!j.contains(key)) continue;
    if (!j[key].is_number()) {
      problems.push_back(std::string(key) + ": must be a number");
      continue;
    }
    (std::string_view(key) == "alpha" ? cfg.weights.alpha : cfg.weights.beta) = j[key].get<double>();
  }
  try {
    cfg.weights.validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }

  std::set<std::string> seen;
  if (!j.contains("pairs") || !j["pairs"].is_array() || j["pairs"].empty()) {
    problems.push_back("pairs: need a nonempty list");
  } else {
    for (const auto& p : j["pairs"]) {
      const bool shaped = p.is_object() && p.contains("users") && p["users"].is_array() &&
                          p["users"].size() == 2 && p["users"][0].is_string() &&
                          p["users"][1].is_string() && p.contains("tokens") &&
                          p["tokens"].is_array() && p["tokens"].size() == 2 &&
                          p["tokens"][0].is_string() && p["tokens"][1].is_string();
      if (!shaped) {
        problems.push_back("pairs: each entry needs two \"users\" and two \"tokens\"");
        continue;
      }
      UserPair pair{p["users"][0].get<std::string>(), p["users"][1].get<std::string>(),
                    p["tokens"][0].get<std::string>(), p["tokens"][1].get<std::string>()};
      for (const auto* user : {&pair.first, &pair.second}) {
        if (user->empty() || user->find_first_of("\t\n\r") != std::string::npos) {
          problems.push_back("pairs: user id \"" + *user + "\" is empty or has control characters");
        }
        if (!seen.insert(*user).second) problems.push_back("pairs: user \"" + *user + "\" is paired twice");
      }
      cfg.pairs.push_back(std::move(pair));
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return cfg;
}

ServerConfig load_server_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_server_config(buf.str(), path.parent_path());
}

}  // namespace vibemoji
