#include "energysaver/simdevice/publisher.hpp"

#include <chrono>
#include <thread>

#include "energysaver/core/json.hpp"
#include "energysaver/util/backoff.hpp"
#include "energysaver/util/log.hpp"
#include "energysaver/wirebus/client.hpp"
#include "energysaver/wirebus/topic.hpp"

namespace energysaver::simdevice {

namespace {

bool should_stop(const PublishOptions& options) {
    return options.stop != nullptr && options.stop->load();
}

std::unique_ptr<wirebus::Client> connect_with_retry(const PublishOptions& options) {
    wirebus::Client::Options copts;
    copts.host = options.broker_host;
    copts.port = options.broker_port;
    copts.client_id = "simdevice-" + options.sensor.str();
    copts.token = options.token;
    util::Backoff backoff(1000, 60000);
    for (int attempt = 1;; ++attempt) {
        try {
            return wirebus::Client::connect(copts);
        } catch (const wirebus::AuthError&) {
            throw;  // retrying cannot help a bad token
        } catch (const wirebus::ConnectionError& e) {
            if (attempt >= options.max_connect_attempts || should_stop(options))
                throw wirebus::ConnectionError("simdevice: broker unreachable after " +
                                               std::to_string(attempt) + " attempts: " + e.what());
            const auto delay = backoff.next_delay_ms();
            log::warnf("simdevice: connect attempt %d failed (%s), retrying in %ld ms", attempt,
                       e.what(), static_cast<long>(delay));
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }
}

void pace(const PublishOptions& options) {
    if (options.speedup <= 0.0) return;
    const auto wall_ms =
        static_cast<std::int64_t>(options.interval_s * 1000.0 / options.speedup);
    std::int64_t slept = 0;
    while (slept < wall_ms && !should_stop(options)) {
        const std::int64_t chunk = std::min<std::int64_t>(100, wall_ms - slept);
        std::this_thread::sleep_for(std::chrono::milliseconds(chunk));
        slept += chunk;
    }
}

}  // namespace

std::uint64_t publish_loop(const PublishOptions& options) {
    check_profile(options.profile);
    if (options.interval_s <= 0.0) throw std::domain_error("interval_s must be > 0");

    const std::string topic = wirebus::reading_topic(options.sensor);
    auto client = connect_with_retry(options);
    log::infof("simdevice '%s': publishing %llu readings on %s", options.sensor.str().c_str(),
               static_cast<unsigned long long>(options.count), topic.c_str());

    const auto interval_ms = static_cast<std::int64_t>(options.interval_s * 1000.0);
    std::uint64_t published = 0;
    std::int64_t ts = options.start_ms;
    while (published < options.count && !should_stop(options)) {
        const auto reading = generate_reading(options.profile, options.sensor, ts,
                                              options.interval_s, options.supply_voltage);
        const std::string payload = core::reading_to_payload(reading);
        try {
            client->publish(topic, payload);
        } catch (const wirebus::ConnectionError& e) {
            log::warnf("simdevice: publish failed (%s), reconnecting", e.what());
            client = connect_with_retry(options);
            continue;  // resend the same timestamp after reconnecting
        }
        ++published;
        ts += interval_ms;
        pace(options);
    }
    client->disconnect();
    return published;
}

}  // namespace energysaver::simdevice
