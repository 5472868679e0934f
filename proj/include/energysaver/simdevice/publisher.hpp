#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "energysaver/simdevice/profile.hpp"

namespace energysaver::simdevice {

struct PublishOptions {
    std::string broker_host = "127.0.0.1";
    std::uint16_t broker_port = 1883;
    std::string token;
    core::SensorId sensor = core::SensorId("s1");
    LoadProfile profile;
    double supply_voltage = 127.0;
    double interval_s = 600.0;          // simulated spacing between readings
    std::int64_t start_ms = 0;          // timestamp of the first reading
    std::uint64_t count = 0;            // number of readings to publish
    double speedup = 0.0;               // 0 = as fast as possible, k = interval/k wall time
    int max_connect_attempts = 5;       // before giving up entirely
    std::atomic<bool>* stop = nullptr;  // optional cooperative stop
};

/// Publishes `count` readings on energysaver/<sensor>/reading with strictly
/// increasing simulated timestamps, reconnecting with backoff on connection
/// loss. Returns the number published; throws ConnectionError if the broker
/// is never reachable.
std::uint64_t publish_loop(const PublishOptions& options);

}  // namespace energysaver::simdevice
