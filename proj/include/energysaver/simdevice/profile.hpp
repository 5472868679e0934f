#pragma once

#include <cstdint>

#include "energysaver/core/types.hpp"

namespace energysaver::simdevice {

/// Synthetic consumption shape: weekday/weekend level, a sinusoidal diurnal
/// swing peaking at 14:00, rare spikes, and gaussian noise. Every sample is a
/// pure function of (seed, timestamp).
struct LoadProfile {
    double base_power_w = 1000.0;
    double weekday_factor = 1.0;
    double weekend_factor = 0.45;
    double diurnal_amplitude = 0.3;   // fraction of base, peak at 14:00
    double spike_probability = 0.002; // per sample
    double spike_multiplier = 3.0;
    double noise_sigma = 0.05;        // fraction of base
    std::uint64_t seed = 1;
};

/// Throws std::domain_error on non-finite factors or a probability outside [0,1].
void check_profile(const LoadProfile& profile);

/// Deterministic expected power draw at an instant, noise and spikes included,
/// clamped at >= 0.
double sample_power_w(const LoadProfile& profile, std::int64_t ts_ms);

/// Builds a full reading: current = power / supply_voltage, power and energy
/// derived so the reading always passes consistency validation.
core::PowerReading generate_reading(const LoadProfile& profile, const core::SensorId& sensor,
                                    std::int64_t ts_ms, double interval_s,
                                    double supply_voltage = 127.0);

}  // namespace energysaver::simdevice
