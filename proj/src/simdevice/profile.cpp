#include "energysaver/simdevice/profile.hpp"

#include <cmath>
#include <stdexcept>

#include "energysaver/core/power.hpp"
#include "energysaver/util/rng.hpp"
#include "energysaver/util/time.hpp"

namespace energysaver::simdevice {

void check_profile(const LoadProfile& profile) {
    const double fields[] = {profile.base_power_w,     profile.weekday_factor,
                             profile.weekend_factor,   profile.diurnal_amplitude,
                             profile.spike_probability, profile.spike_multiplier,
                             profile.noise_sigma};
    for (double f : fields)
        if (!std::isfinite(f)) throw std::domain_error("load profile: non-finite field");
    if (profile.base_power_w <= 0.0) throw std::domain_error("load profile: base_power_w must be > 0");
    if (profile.weekday_factor < 0.0 || profile.weekend_factor < 0.0)
        throw std::domain_error("load profile: factors must be >= 0");
    if (profile.spike_probability < 0.0 || profile.spike_probability > 1.0)
        throw std::domain_error("load profile: spike_probability must be in [0,1]");
}

double sample_power_w(const LoadProfile& profile, std::int64_t ts_ms) {
    const std::int64_t days = ts_ms >= 0 ? ts_ms / util::kMsPerDay : (ts_ms - util::kMsPerDay + 1) / util::kMsPerDay;
    const int weekday = util::weekday_from_days(days);
    const bool weekend = weekday == 0 || weekday == 6;
    const double factor = weekend ? profile.weekend_factor : profile.weekday_factor;

    const double hour =
        static_cast<double>(ts_ms - days * util::kMsPerDay) / static_cast<double>(util::kMsPerHour);
    const double diurnal = 1.0 + profile.diurnal_amplitude * std::cos(2.0 * M_PI * (hour - 14.0) / 24.0);

    util::KeyedStream stream(profile.seed, static_cast<std::uint64_t>(ts_ms));
    const bool spike = stream.uniform() < profile.spike_probability;
    const double noise = stream.gaussian() * profile.noise_sigma * profile.base_power_w;

    double power = profile.base_power_w * factor * diurnal * (spike ? profile.spike_multiplier : 1.0) + noise;
    if (power < 0.0) power = 0.0;
    return power;
}

core::PowerReading generate_reading(const LoadProfile& profile, const core::SensorId& sensor,
                                    std::int64_t ts_ms, double interval_s, double supply_voltage) {
    if (!(supply_voltage > 0.0)) throw std::domain_error("supply_voltage must be > 0");
    const double power = sample_power_w(profile, ts_ms);
    const double current = power / supply_voltage;
    return core::make_reading(sensor, ts_ms, supply_voltage, current, interval_s);
}

}  // namespace energysaver::simdevice
