#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cesaro/experiment.hpp"
#include "cesaro/serialize.hpp"

namespace cesaro {

inline constexpr int kConfigVersion = 1;

/// Everything a CLI run needs. All sections except `version` are optional.
struct RunConfig {
  ProtocolConfig protocol;
  int design_K = 1;
  double schedule_epsilon = 0.01;
  int schedule_interval = 1;
  std::vector<double> speeds{10.0, 100.0, 1000.0};
  int verify_trials = 100;
  std::uint64_t verify_seed = 1;
  std::string output_dir = "out";
  std::int64_t schedule_rows = 200;
};

/// Parses and validates; errors are ConfigError naming the offending field path.
RunConfig parse_config(const Json& j);
/// Reads a file; JSON syntax errors report line and column.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Accepts a JSON number or a "p/q" rational string.
double parse_rational(const Json& j, const std::string& path);

}  // namespace cesaro
