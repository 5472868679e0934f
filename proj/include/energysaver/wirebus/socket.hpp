#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace energysaver::wirebus {

class ConnectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Peer closed the connection.
class ConnectionClosed : public ConnectionError {
public:
    using ConnectionError::ConnectionError;
};

/// Move-only owning wrapper around a connected TCP socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& other) noexcept;
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    static Socket connect_tcp(const std::string& host, std::uint16_t port, int timeout_ms = 5000);

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }

    /// Sends the whole buffer; throws ConnectionError/ConnectionClosed.
    void send_all(const void* data, std::size_t size);

    /// Reads exactly `size` bytes. timeout_ms < 0 blocks indefinitely.
    /// Throws ConnectionClosed on EOF and ConnectionError on socket errors
    /// or timeout mid-read.
    void recv_exact(void* data, std::size_t size, int timeout_ms);

    /// Waits for readability. Returns false on timeout.
    bool wait_readable(int timeout_ms) const;

    /// Unblocks any thread sleeping in recv on this socket.
    void shutdown_both();

    void close();

private:
    int fd_ = -1;
};

/// Listening TCP socket bound to host:port (port 0 picks an ephemeral port).
class Listener {
public:
    Listener() = default;
    ~Listener();
    Listener(Listener&& other) noexcept;
    Listener& operator=(Listener&& other) noexcept;
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    static Listener bind_tcp(const std::string& host, std::uint16_t port);

    std::uint16_t port() const { return port_; }
    bool valid() const { return fd_ >= 0; }

    /// Accepts one connection; nullopt on timeout or if the listener was shut down.
    std::optional<Socket> accept(int timeout_ms);

    void shutdown();
    void close();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// "host" or "host:port"; returns {host, port} with the default applied.
std::pair<std::string, std::uint16_t> split_host_port(const std::string& address,
                                                      std::uint16_t default_port);

}  // namespace energysaver::wirebus
