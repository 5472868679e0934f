#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace energysaver::wirebus {

// Wire layout: 1 byte kind, 4-byte big-endian body length, body.
// Strings inside bodies are a 2-byte big-endian length followed by UTF-8.
// ConnAck/SubAck bodies are a single status byte.
inline constexpr std::size_t kMaxFrameBytes = 1024 * 1024;  // header included
inline constexpr std::size_t kFrameHeaderBytes = 5;

// Status bytes used by ConnAck/SubAck.
inline constexpr std::uint8_t kStatusOk = 0;
inline constexpr std::uint8_t kStatusAuthFailure = 1;
inline constexpr std::uint8_t kStatusMalformed = 2;

enum class FrameKind : std::uint8_t {
    Connect = 1,
    ConnAck = 2,
    Publish = 3,
    Subscribe = 4,
    SubAck = 5,
    PingReq = 6,
    PingResp = 7,
    Disconnect = 8,
};

struct Connect {
    std::string client_id;
    std::string token;
    friend bool operator==(const Connect&, const Connect&) = default;
};
struct ConnAck {
    std::uint8_t status = kStatusOk;
    friend bool operator==(const ConnAck&, const ConnAck&) = default;
};
struct Publish {
    std::string topic;
    std::vector<std::uint8_t> payload;
    friend bool operator==(const Publish&, const Publish&) = default;
};
struct Subscribe {
    std::string filter;
    friend bool operator==(const Subscribe&, const Subscribe&) = default;
};
struct SubAck {
    std::uint8_t status = kStatusOk;
    friend bool operator==(const SubAck&, const SubAck&) = default;
};
struct PingReq {
    friend bool operator==(const PingReq&, const PingReq&) = default;
};
struct PingResp {
    friend bool operator==(const PingResp&, const PingResp&) = default;
};
struct Disconnect {
    friend bool operator==(const Disconnect&, const Disconnect&) = default;
};

using Frame = std::variant<Connect, ConnAck, Publish, Subscribe, SubAck, PingReq, PingResp, Disconnect>;

FrameKind frame_kind(const Frame& frame);
const char* to_string(FrameKind kind);

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DecodeError {
    enum class Kind {
        UnknownKind,
        Truncated,
        TrailingBytes,
        Oversize,
        BadUtf8,
        BadTopic,
    };
    Kind kind;
    std::string detail;
};

const char* to_string(DecodeError::Kind kind);

using DecodeResult = std::variant<Frame, DecodeError>;

/// Serializes a valid frame. Throws EncodeError when the result would exceed
/// max_frame_bytes or when a topic/string violates its bounds.
std::vector<std::uint8_t> encode_frame(const Frame& frame, std::size_t max_frame_bytes = kMaxFrameBytes);

/// Parses one complete frame. Never throws on arbitrary input; malformed
/// buffers yield a DecodeError whose kind distinguishes the failure.
DecodeResult decode_frame(std::span<const std::uint8_t> buffer,
                          std::size_t max_frame_bytes = kMaxFrameBytes);

bool utf8_valid(std::span<const std::uint8_t> bytes);

}  // namespace energysaver::wirebus
