#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace rlncsim::cli {

/// Malformed configuration (unknown key, bad value, missing file). Mapped to
/// exit code 2; messages carry the file line when one is known.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One parsed `key = value` entry with its source line (0 for overrides).
struct ConfigValue {
  std::string value;
  int line = 0;
};

using Config = std::map<std::string, ConfigValue>;

/// Parses the flat key-value config format: one `key = value` per line,
/// blank lines and `#` comments ignored.
Config load_config(const std::string& path);

/// Full CLI entry point. Exit codes: 0 success, 2 config error, 3 domain
/// error.
int run(int argc, const char* const* argv);

}  // namespace rlncsim::cli
