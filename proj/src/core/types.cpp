#include "energysaver/core/types.hpp"

#include <stdexcept>

namespace energysaver::core {

bool SensorId::valid(std::string_view value) {
    if (value.empty() || value.size() > 64) return false;
    for (char c : value) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

SensorId::SensorId(std::string value) : value_(std::move(value)) {
    if (!valid(value_))
        throw std::invalid_argument("invalid sensor id '" + value_ +
                                    "': want 1..64 chars of [A-Za-z0-9_-]");
}

void check_profile(const SensorProfile& profile) {
    if (!(profile.v_min < profile.v_max))
        throw std::domain_error("sensor profile: v_min must be < v_max");
    if (!(profile.i_min < profile.i_max))
        throw std::domain_error("sensor profile: i_min must be < i_max");
    if (!(profile.max_gap_s > 0.0))
        throw std::domain_error("sensor profile: max_gap_s must be > 0");
}

const char* to_string(ValidationReason reason) {
    switch (reason) {
        case ValidationReason::Ok: return "ok";
        case ValidationReason::VoltageOutOfRange: return "voltage_out_of_range";
        case ValidationReason::CurrentOutOfRange: return "current_out_of_range";
        case ValidationReason::NonMonotonicTimestamp: return "non_monotonic_timestamp";
        case ValidationReason::PowerMismatch: return "power_mismatch";
    }
    return "unknown";
}

}  // namespace energysaver::core
