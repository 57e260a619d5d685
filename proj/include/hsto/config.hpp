#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hsto/stepping.hpp"

namespace hsto {

/// Reads a TOML run description. Unknown keys, wrong types and broken invariants
/// are hard errors naming the offending [section].key; syntax errors carry line:column.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(std::string_view text, std::string_view source = "<string>");

/// Fully resolved config, every key present, re-readable by parse_config_string.
std::string config_to_toml(const RunConfig& config);

std::string_view to_string(NoiseTarget target);
NoiseTarget parse_noise_target(std::string_view name);

} // namespace hsto
