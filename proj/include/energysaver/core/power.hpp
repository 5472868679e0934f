#pragma once

#include <cstdint>
#include <optional>

#include "energysaver/core/types.hpp"

namespace energysaver::core {

/// Relative tolerance when checking a reading's power_w against V*I.
inline constexpr double kPowerConsistencyRelTol = 1e-6;

/// P = V * I. Throws std::domain_error naming the offending field on a
/// negative or non-finite input.
double instantaneous_power(double voltage_rms, double current_rms);

/// E = P * dt / 3600, in watt-hours. Throws std::domain_error on a
/// non-positive or non-finite interval or a negative/non-finite power.
double interval_energy(double power_w, double interval_s);

/// Builds a reading whose power and energy are derived from voltage/current,
/// so it satisfies the consistency invariants by construction.
PowerReading make_reading(SensorId sensor, std::int64_t ts_ms, double voltage_rms,
                          double current_rms, double interval_s);

/// Checks a reading against profile thresholds and timestamp ordering.
/// Check order: voltage range, current range, power consistency, timestamp.
/// The first failing check determines the reason. A sensor mismatch between
/// reading and profile is a usage error (std::invalid_argument), not a verdict.
ValidationVerdict validate_reading(const PowerReading& reading, const SensorProfile& profile,
                                   std::optional<std::int64_t> previous_ts_ms);

}  // namespace energysaver::core
