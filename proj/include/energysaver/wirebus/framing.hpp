#pragma once

#include <cstdint>
#include <vector>

#include "energysaver/wirebus/frame.hpp"
#include "energysaver/wirebus/socket.hpp"

namespace energysaver::wirebus {

/// A complete frame arrived but failed to decode.
class MalformedFrame : public std::runtime_error {
public:
    explicit MalformedFrame(DecodeError error)
        : std::runtime_error(std::string("malformed frame: ") + to_string(error.kind) +
                             (error.detail.empty() ? "" : " (" + error.detail + ")")),
          error_(std::move(error)) {}

    const DecodeError& error() const { return error_; }

private:
    DecodeError error_;
};

/// Reads one length-prefixed frame; returns the raw bytes (header included).
/// The length field is checked against max_frame_bytes before the body is
/// read, so an oversize declaration throws MalformedFrame without draining.
/// first_byte_timeout_ms < 0 blocks until data or close.
std::vector<std::uint8_t> read_raw_frame(Socket& socket, std::size_t max_frame_bytes,
                                         int first_byte_timeout_ms, int rest_timeout_ms = 10000);

/// read_raw_frame + decode_frame; throws MalformedFrame on decode failure.
Frame read_frame(Socket& socket, std::size_t max_frame_bytes, int first_byte_timeout_ms,
                 int rest_timeout_ms = 10000);

void write_frame(Socket& socket, const Frame& frame,
                 std::size_t max_frame_bytes = kMaxFrameBytes);

}  // namespace energysaver::wirebus
