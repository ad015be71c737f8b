#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vibemoji/relay.hpp"

namespace vibemoji {

/// JSON document:
///   {"listen": "127.0.0.1:7400", "http": "127.0.0.1:7401",
///    "catalog": "sample_catalog.json", "data_dir": "var",
///    "pairs": [{"users": ["anna", "brad"], "tokens": ["t-anna", "t-brad"]}],
///    "alpha": 0.6, "beta": 0.4, "webhook_url": "http://127.0.0.1:9000/notify"}
/// Relative paths resolve against the config file's directory.
struct ServerConfig {
  std::string listen_address = "127.0.0.1:7400";
  std::optional<std::string> http_address;
  std::filesystem::path catalog_path;
  std::filesystem::path data_dir;
  std::vector<UserPair> pairs;
  Weights weights;
  std::optional<std::string> webhook_url;
};

/// Throws IoError when unreadable, ParseError when malformed, and
/// ValidationError when a field breaks an invariant.
ServerConfig load_server_config(const std::filesystem::path& path);
ServerConfig parse_server_config(std::string_view text, const std::filesystem::path& base_dir);

}  // namespace vibemoji
