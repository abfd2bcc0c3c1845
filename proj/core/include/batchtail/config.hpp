#pragma once

#include <string>

#include "batchtail/design.hpp"

namespace batchtail {

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::int64_t reps = -1;
  std::int64_t is_draws = -1;
  std::int64_t seed = -1;
  int threads = -1;
  std::vector<double> alphas;  // empty = keep
};

/// Parse a config JSON document. Collects all schema violations into one
/// validation_error naming the offending keys.
DesignConfig load_config(const std::string& json_text);
DesignConfig load_config_file(const std::string& path);

void apply_overrides(DesignConfig& config, const Overrides& ov);

/// Canonical digest of the effective configuration (FNV-1a over the
/// sorted-key JSON serialization), for the run manifest.
std::string config_digest(const DesignConfig& config);

/// Round-trip serialization of the effective config (sorted keys).
std::string config_to_json(const DesignConfig& config);

}  // namespace batchtail
