#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "energysaver/core/types.hpp"

namespace energysaver::core {

class PayloadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading as a flat JSON object with the canonical field names. interval_s
/// is emitted as an integer when integral so stored documents and CSV export
/// keep the natural type.
nlohmann::json reading_to_json(const PowerReading& reading);

/// Canonical single-line encoding (sorted keys, no whitespace).
std::string reading_to_payload(const PowerReading& reading);

/// Parses a payload object. voltage, current, interval_s, sensor_id and ts_ms
/// are required; power and energy_wh are derived when absent. Throws
/// PayloadError with a one-line reason on anything malformed.
PowerReading reading_from_json(const nlohmann::json& payload);

PowerReading reading_from_payload(std::string_view payload);

}  // namespace energysaver::core
