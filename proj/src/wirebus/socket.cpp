#include "energysaver/wirebus/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace energysaver::wirebus {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw ConnectionError(what + ": " + std::strerror(errno));
}

}  // namespace

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

Socket Socket::connect_tcp(const std::string& host, std::uint16_t port, int timeout_ms) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string service = std::to_string(port);
    if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || res == nullptr)
        throw ConnectionError("cannot resolve '" + host + "'");

    int fd = -1;
    int saved_errno = 0;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) {
            saved_errno = errno;
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        saved_errno = errno;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) {
        errno = saved_errno;
        throw_errno("connect to " + host + ":" + service + " failed");
    }
    (void)timeout_ms;  // connect uses the OS default; I/O timeouts are per call
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return Socket(fd);
}

void Socket::send_all(const void* data, std::size_t size) {
    const char* p = static_cast<const char*>(data);
    std::size_t left = size;
    while (left > 0) {
        const ssize_t n = ::send(fd_, p, left, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EPIPE || errno == ECONNRESET)
                throw ConnectionClosed("connection closed on send");
            throw_errno("send failed");
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

bool Socket::wait_readable(int timeout_ms) const {
    pollfd pfd{fd_, POLLIN, 0};
    while (true) {
        const int rc = ::poll(&pfd, 1, timeout_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw_errno("poll failed");
        }
        return rc > 0;
    }
}

void Socket::recv_exact(void* data, std::size_t size, int timeout_ms) {
    char* p = static_cast<char*>(data);
    std::size_t left = size;
    while (left > 0) {
        if (!wait_readable(timeout_ms))
            throw ConnectionError("read timed out");
        const ssize_t n = ::recv(fd_, p, left, 0);
        if (n == 0) throw ConnectionClosed("connection closed by peer");
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == ECONNRESET) throw ConnectionClosed("connection reset by peer");
            throw_errno("recv failed");
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
}

void Socket::shutdown_both() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Listener::~Listener() { close(); }

Listener::Listener(Listener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
    other.fd_ = -1;
    other.port_ = 0;
}

Listener& Listener::operator=(Listener&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        port_ = other.port_;
        other.fd_ = -1;
        other.port_ = 0;
    }
    return *this;
}

Listener Listener::bind_tcp(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket failed");
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "0.0.0.0") {
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
    } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw ConnectionError("listen host must be an IPv4 address, got '" + host + "'");
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int e = errno;
        ::close(fd);
        errno = e;
        throw_errno("bind to " + host + ":" + std::to_string(port) + " failed");
    }
    if (::listen(fd, 64) != 0) {
        const int e = errno;
        ::close(fd);
        errno = e;
        throw_errno("listen failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);

    Listener l;
    l.fd_ = fd;
    l.port_ = ntohs(bound.sin_port);
    return l;
}

std::optional<Socket> Listener::accept(int timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, timeout_ms);
    if (rc <= 0) return std::nullopt;
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) return std::nullopt;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return Socket(fd);
}

void Listener::shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Listener::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::pair<std::string, std::uint16_t> split_host_port(const std::string& address,
                                                      std::uint16_t default_port) {
    const auto pos = address.rfind(':');
    if (pos == std::string::npos) return {address, default_port};
    const std::string host = address.substr(0, pos);
    const std::string port_str = address.substr(pos + 1);
    char* end = nullptr;
    const long port = std::strtol(port_str.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || port < 0 || port > 65535)
        throw ConnectionError("invalid port in address '" + address + "'");
    return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace energysaver::wirebus
