#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace energysaver::core {

/// Device identity. Restricted to [A-Za-z0-9_-], 1..64 bytes, so ids are safe
/// inside topic paths and as file names.
class SensorId {
public:
    static bool valid(std::string_view value);

    explicit SensorId(std::string value);

    const std::string& str() const { return value_; }

    friend bool operator==(const SensorId& a, const SensorId& b) = default;
    friend auto operator<=>(const SensorId& a, const SensorId& b) = default;

private:
    std::string value_;
};

/// One timestamped sample: the two measured electrical quantities plus the
/// derived power and interval energy.
struct PowerReading {
    SensorId sensor;
    std::int64_t ts_ms = 0;     // UTC epoch milliseconds
    double voltage_rms = 0.0;   // V
    double current_rms = 0.0;   // A
    double power_w = 0.0;       // W
    double interval_s = 0.0;    // s, > 0
    double energy_wh = 0.0;     // Wh over interval_s
};

/// Per-sensor plausibility thresholds for validation. Defaults bracket common
/// 127 V / 220 V supplies.
struct SensorProfile {
    SensorId sensor = SensorId("default");
    double v_min = 90.0;
    double v_max = 260.0;
    double i_min = 0.0;
    double i_max = 40.0;
    double max_gap_s = 86400.0;  // maximum plausible spacing between samples
};

/// Throws std::domain_error if the profile thresholds are inconsistent.
void check_profile(const SensorProfile& profile);

enum class ValidationReason {
    Ok,
    VoltageOutOfRange,
    CurrentOutOfRange,
    NonMonotonicTimestamp,
    PowerMismatch,
};

const char* to_string(ValidationReason reason);

struct ValidationVerdict {
    bool accepted = false;
    ValidationReason reason = ValidationReason::Ok;

    static ValidationVerdict ok() { return {true, ValidationReason::Ok}; }
    static ValidationVerdict reject(ValidationReason r) { return {false, r}; }

    friend bool operator==(const ValidationVerdict&, const ValidationVerdict&) = default;
};

// Canonical JSON field names shared by wire payloads and stored documents.
inline constexpr std::string_view kFieldSensorId = "sensor_id";
inline constexpr std::string_view kFieldTsMs = "ts_ms";
inline constexpr std::string_view kFieldVoltage = "voltage";
inline constexpr std::string_view kFieldCurrent = "current";
inline constexpr std::string_view kFieldPower = "power";
inline constexpr std::string_view kFieldIntervalS = "interval_s";
inline constexpr std::string_view kFieldEnergyWh = "energy_wh";

}  // namespace energysaver::core
