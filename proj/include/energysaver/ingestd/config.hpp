#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "energysaver/core/types.hpp"

namespace energysaver::ingestd {

struct IngestConfig {
    // Broker side. An empty broker_host disables the ingest loop (HTTP only).
    std::string broker_host = "127.0.0.1";
    std::uint16_t broker_port = 1883;
    std::string broker_token;
    std::string topic_filter = "energysaver/#";

    std::filesystem::path data_dir = "data";

    // HTTP side. Port 0 picks an ephemeral port. Empty api_tokens disables
    // bearer authentication.
    std::string http_host = "0.0.0.0";
    std::uint16_t http_port = 5000;
    std::vector<std::string> api_tokens;

    std::vector<core::SensorProfile> profiles;  // per-sensor overrides
    core::SensorProfile default_profile;        // applied to unknown sensors

    std::int64_t backoff_base_ms = 1000;
    std::int64_t backoff_cap_ms = 60000;

    void validate() const;

    /// Profile for a sensor: the configured one, or the default with the
    /// sensor id substituted.
    core::SensorProfile profile_for(const core::SensorId& sensor) const;
};

/// Parses the "ingestd" section of a config file. Unknown keys are rejected
/// with the offending path named.
IngestConfig ingest_config_from_json(const nlohmann::json& section);

core::SensorProfile sensor_profile_from_json(const nlohmann::json& obj, const std::string& path);

}  // namespace energysaver::ingestd
