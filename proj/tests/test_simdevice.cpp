#include <doctest.h>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "energysaver/core/power.hpp"
#include "energysaver/simdevice/profile.hpp"
#include "energysaver/util/time.hpp"

using namespace energysaver;
using namespace energysaver::simdevice;

namespace {

// Mon Jan 7 2019 (a Monday) at 00:00 UTC
const std::int64_t kMonday = util::civil_to_epoch_ms(2019, 1, 7);
// Sat Jan 5 2019
const std::int64_t kSaturday = util::civil_to_epoch_ms(2019, 1, 5);

double autocorrelation(const std::vector<double>& x, std::size_t lag) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) num += (x[i] - mean) * (x[i + lag] - mean);
    for (std::size_t i = 0; i < n; ++i) den += (x[i] - mean) * (x[i] - mean);
    return num / den;
}

}  // namespace

TEST_CASE("profile validation") {
    LoadProfile p;
    CHECK_NOTHROW(check_profile(p));
    p.spike_probability = 1.5;
    CHECK_THROWS_AS(check_profile(p), std::domain_error);
    p.spike_probability = 0.0;
    p.base_power_w = 0.0;
    CHECK_THROWS_AS(check_profile(p), std::domain_error);
}

TEST_CASE("same (seed, timestamp) gives an identical reading") {
    LoadProfile profile;
    profile.seed = 9;
    const core::SensorId sensor("s1");
    const auto a = generate_reading(profile, sensor, kMonday, 600.0);
    const auto b = generate_reading(profile, sensor, kMonday, 600.0);
    CHECK(a.power_w == b.power_w);
    CHECK(a.current_rms == b.current_rms);
    CHECK(a.energy_wh == b.energy_wh);

    LoadProfile other = profile;
    other.seed = 10;
    const auto c = generate_reading(other, sensor, kMonday, 600.0);
    CHECK(a.power_w != c.power_w);

    // determinism is per timestamp, not per draw order
    const auto later = generate_reading(profile, sensor, kMonday + 600'000, 600.0);
    const auto again = generate_reading(profile, sensor, kMonday, 600.0);
    CHECK(again.power_w == a.power_w);
    CHECK(later.power_w != a.power_w);
}

TEST_CASE("degenerate profile is the flat weekday/weekend square wave") {
    LoadProfile profile;
    profile.noise_sigma = 0.0;
    profile.spike_probability = 0.0;
    profile.diurnal_amplitude = 0.0;
    CHECK(sample_power_w(profile, kMonday) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(sample_power_w(profile, kMonday + 3'600'000) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(sample_power_w(profile, kSaturday) == doctest::Approx(450.0).epsilon(1e-12));
}

TEST_CASE("diurnal shape peaks at 14:00") {
    LoadProfile profile;
    profile.noise_sigma = 0.0;
    profile.spike_probability = 0.0;
    const auto at_hour = [&](int h) {
        return sample_power_w(profile, kMonday + h * util::kMsPerHour);
    };
    CHECK(at_hour(14) == doctest::Approx(1300.0).epsilon(1e-9));  // peak: base * (1 + 0.3)
    CHECK(at_hour(2) == doctest::Approx(700.0).epsilon(1e-9));    // trough, 12 h away
    CHECK(at_hour(14) > at_hour(10));
    CHECK(at_hour(10) > at_hour(4));
}

TEST_CASE("weekend mean power is below weekday mean over one week") {
    LoadProfile profile;
    profile.seed = 4;
    double weekday_sum = 0.0, weekend_sum = 0.0;
    int weekday_n = 0, weekend_n = 0;
    const std::int64_t start = util::civil_to_epoch_ms(2019, 1, 7);  // Monday
    for (int i = 0; i < 7 * 24; ++i) {
        const std::int64_t ts = start + i * util::kMsPerHour;
        const double p = sample_power_w(profile, ts);
        if (i < 5 * 24) {
            weekday_sum += p;
            ++weekday_n;
        } else {
            weekend_sum += p;
            ++weekend_n;
        }
    }
    CHECK(weekend_sum / weekend_n < weekday_sum / weekday_n);
}

TEST_CASE("generated readings pass validation under the default profile") {
    LoadProfile profile;
    profile.seed = 11;
    const core::SensorId sensor("s1");
    core::SensorProfile limits{sensor};  // defaults: [90,260] V, [0,40] A
    std::optional<std::int64_t> prev;
    for (int i = 0; i < 500; ++i) {
        const std::int64_t ts = kMonday + i * 600'000;
        const auto reading = generate_reading(profile, sensor, ts, 600.0);
        const auto verdict = core::validate_reading(reading, limits, prev);
        CHECK(verdict.accepted);
        prev = reading.ts_ms;
    }
}

TEST_CASE("daily aggregates repeat weekly: lag-7 autocorrelation beats lag-3") {
    LoadProfile profile;
    profile.seed = 2;
    std::vector<double> daily;
    const std::int64_t start = util::civil_to_epoch_ms(2019, 1, 7);
    for (int day = 0; day < 70; ++day) {  // ten weeks
        double sum = 0.0;
        for (int h = 0; h < 24; ++h)
            sum += sample_power_w(profile, start + day * util::kMsPerDay + h * util::kMsPerHour);
        daily.push_back(sum);
    }
    CHECK(autocorrelation(daily, 7) > autocorrelation(daily, 3));
}
