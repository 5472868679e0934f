#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "energysaver/wirebus/framing.hpp"

namespace energysaver::wirebus {

/// Broker rejected the connect token.
class AuthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Peer sent something the protocol does not allow at this point.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Single-threaded broker client. May be moved between threads but must not
/// be used from two threads at once; shutdown() is the one exception and may
/// be called from anywhere to unblock a pending receive.
class Client {
public:
    struct Options {
        std::string host = "127.0.0.1";
        std::uint16_t port = 1883;
        std::string client_id;
        std::string token;
        std::size_t max_frame_bytes = kMaxFrameBytes;
        int io_timeout_ms = 10000;
    };

    struct Message {
        std::string topic;
        std::vector<std::uint8_t> payload;

        std::string_view payload_text() const {
            return {reinterpret_cast<const char*>(payload.data()), payload.size()};
        }
    };

    /// Connects and authenticates. Throws AuthError on a rejected token,
    /// ConnectionError if the broker is unreachable, ProtocolError otherwise.
    static std::unique_ptr<Client> connect(const Options& options);

    ~Client();

    void publish(std::string_view topic, std::span<const std::uint8_t> payload);
    void publish(std::string_view topic, std::string_view payload);

    /// Sends a subscription and waits for the SubAck. Matching messages that
    /// arrive for earlier subscriptions while waiting are queued, never lost.
    /// Throws std::invalid_argument on a malformed filter before any traffic.
    void subscribe(std::string_view filter);

    /// Next message, in wire arrival order. nullopt on timeout; throws
    /// ConnectionClosed when the stream ends.
    std::optional<Message> receive(int timeout_ms);

    /// PingReq/PingResp round trip.
    void ping();

    /// Sends Disconnect (best effort) and closes.
    void disconnect();

    void shutdown();

private:
    explicit Client(const Options& options);

    Frame read_one(int timeout_ms_first_byte);

    Options options_;
    Socket sock_;
    std::deque<Message> inbox_;
};

}  // namespace energysaver::wirebus
