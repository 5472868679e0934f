#include "energysaver/wirebus/framing.hpp"

namespace energysaver::wirebus {

std::vector<std::uint8_t> read_raw_frame(Socket& socket, std::size_t max_frame_bytes,
                                         int first_byte_timeout_ms, int rest_timeout_ms) {
    std::uint8_t header[kFrameHeaderBytes];
    socket.recv_exact(header, 1, first_byte_timeout_ms);
    socket.recv_exact(header + 1, kFrameHeaderBytes - 1, rest_timeout_ms);

    const std::uint64_t body_len = (static_cast<std::uint64_t>(header[1]) << 24) |
                                   (static_cast<std::uint64_t>(header[2]) << 16) |
                                   (static_cast<std::uint64_t>(header[3]) << 8) |
                                   static_cast<std::uint64_t>(header[4]);
    if (body_len + kFrameHeaderBytes > max_frame_bytes)
        throw MalformedFrame(DecodeError{DecodeError::Kind::Oversize,
                                         "declared body of " + std::to_string(body_len) + " bytes"});

    std::vector<std::uint8_t> buf(kFrameHeaderBytes + body_len);
    std::copy(header, header + kFrameHeaderBytes, buf.begin());
    if (body_len > 0) socket.recv_exact(buf.data() + kFrameHeaderBytes, body_len, rest_timeout_ms);
    return buf;
}

Frame read_frame(Socket& socket, std::size_t max_frame_bytes, int first_byte_timeout_ms,
                 int rest_timeout_ms) {
    const auto raw = read_raw_frame(socket, max_frame_bytes, first_byte_timeout_ms, rest_timeout_ms);
    auto result = decode_frame(raw, max_frame_bytes);
    if (auto* err = std::get_if<DecodeError>(&result)) throw MalformedFrame(*err);
    return std::get<Frame>(std::move(result));
}

void write_frame(Socket& socket, const Frame& frame, std::size_t max_frame_bytes) {
    const auto bytes = encode_frame(frame, max_frame_bytes);
    socket.send_all(bytes.data(), bytes.size());
}

}  // namespace energysaver::wirebus
