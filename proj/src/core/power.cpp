#include "energysaver/core/power.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace energysaver::core {

namespace {

void require_finite_nonneg(double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0)
        throw std::domain_error(std::string(field) + " must be finite and non-negative");
}

bool in_range(double v, double lo, double hi) {
    return std::isfinite(v) && v >= lo && v <= hi;
}

}  // namespace

double instantaneous_power(double voltage_rms, double current_rms) {
    require_finite_nonneg(voltage_rms, "voltage_rms");
    require_finite_nonneg(current_rms, "current_rms");
    return voltage_rms * current_rms;
}

double interval_energy(double power_w, double interval_s) {
    require_finite_nonneg(power_w, "power_w");
    if (!std::isfinite(interval_s) || interval_s <= 0.0)
        throw std::domain_error("interval_s must be finite and > 0");
    return power_w * interval_s / 3600.0;
}

PowerReading make_reading(SensorId sensor, std::int64_t ts_ms, double voltage_rms,
                          double current_rms, double interval_s) {
    const double power = instantaneous_power(voltage_rms, current_rms);
    const double energy = interval_energy(power, interval_s);
    return PowerReading{std::move(sensor), ts_ms, voltage_rms, current_rms, power, interval_s, energy};
}

ValidationVerdict validate_reading(const PowerReading& reading, const SensorProfile& profile,
                                   std::optional<std::int64_t> previous_ts_ms) {
    if (reading.sensor != profile.sensor)
        throw std::invalid_argument("validate_reading: profile is for sensor '" +
                                    profile.sensor.str() + "', reading is for '" +
                                    reading.sensor.str() + "'");

    // Non-finite measurements fail the corresponding range check.
    if (!in_range(reading.voltage_rms, profile.v_min, profile.v_max))
        return ValidationVerdict::reject(ValidationReason::VoltageOutOfRange);
    if (!in_range(reading.current_rms, profile.i_min, profile.i_max))
        return ValidationVerdict::reject(ValidationReason::CurrentOutOfRange);

    const double expected = reading.voltage_rms * reading.current_rms;
    const double denom = std::max(std::abs(expected), std::abs(reading.power_w));
    if (!std::isfinite(reading.power_w) ||
        (denom > 0.0 && std::abs(reading.power_w - expected) > kPowerConsistencyRelTol * denom))
        return ValidationVerdict::reject(ValidationReason::PowerMismatch);

    if (previous_ts_ms && reading.ts_ms <= *previous_ts_ms)
        return ValidationVerdict::reject(ValidationReason::NonMonotonicTimestamp);

    return ValidationVerdict::ok();
}

}  // namespace energysaver::core
