#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "stiffjnd/harness.hpp"
#include "stiffjnd/session.hpp"

namespace stiffjnd {

inline constexpr int kConfigSchemaVersion = 1;

/// JSON text of a protocol config with every field spelled out.
std::string protocol_config_json(const ProtocolConfig& config);

/// Parses a protocol config object. Missing fields keep their defaults;
/// unknown fields and type mismatches throw ConfigError.
ProtocolConfig parse_protocol_config(std::string_view json_text);

std::string harness_config_json(const HarnessConfig& config);

/// Parses a harness config file body:
///   {"schema_version": 1, "plant": {...}, "staircase": {...},
///    "observer": {"kind": "psychometric" | "embodied" | "always_correct" | "always_wrong", ...},
///    "session": {...}, "batch": {...}, "output": {"directory": "..."}}
/// Structural problems throw ConfigError; value-range problems are left to
/// validate_config.
HarnessConfig parse_harness_config(std::string_view json_text);

/// Reads and parses a config file; throws IoError if it cannot be read.
HarnessConfig load_harness_config(const std::filesystem::path& path);

} // namespace stiffjnd
