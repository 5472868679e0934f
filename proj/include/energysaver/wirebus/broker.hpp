#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

namespace energysaver::wirebus {

/// Publish/subscribe message broker. QoS 0: frames are fanned out to live
/// matching sessions in per-publisher order and never retransmitted or
/// retained. A session becomes live only after a Connect carrying one of the
/// accepted tokens.
class Broker {
public:
    struct Options {
        std::string listen_host = "0.0.0.0";
        std::uint16_t port = 1883;  // 0 picks an ephemeral port
        std::vector<std::string> tokens;
        std::size_t max_frame_bytes = 1024 * 1024;
    };

    /// Binds and starts serving. Throws ConnectionError on bind failure.
    static std::unique_ptr<Broker> serve(Options options);

    ~Broker();
    Broker(const Broker&) = delete;
    Broker& operator=(const Broker&) = delete;

    std::uint16_t port() const;

    /// Closes all connections and stops the accept loop. Idempotent.
    void stop();

    std::size_t live_sessions() const;

private:
    Broker();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace energysaver::wirebus
