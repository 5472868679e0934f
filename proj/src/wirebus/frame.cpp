#include "energysaver/wirebus/frame.hpp"

#include "energysaver/wirebus/topic.hpp"

namespace energysaver::wirebus {

FrameKind frame_kind(const Frame& frame) {
    struct Visitor {
        FrameKind operator()(const Connect&) const { return FrameKind::Connect; }
        FrameKind operator()(const ConnAck&) const { return FrameKind::ConnAck; }
        FrameKind operator()(const Publish&) const { return FrameKind::Publish; }
        FrameKind operator()(const Subscribe&) const { return FrameKind::Subscribe; }
        FrameKind operator()(const SubAck&) const { return FrameKind::SubAck; }
        FrameKind operator()(const PingReq&) const { return FrameKind::PingReq; }
        FrameKind operator()(const PingResp&) const { return FrameKind::PingResp; }
        FrameKind operator()(const Disconnect&) const { return FrameKind::Disconnect; }
    };
    return std::visit(Visitor{}, frame);
}

const char* to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::Connect: return "connect";
        case FrameKind::ConnAck: return "connack";
        case FrameKind::Publish: return "publish";
        case FrameKind::Subscribe: return "subscribe";
        case FrameKind::SubAck: return "suback";
        case FrameKind::PingReq: return "pingreq";
        case FrameKind::PingResp: return "pingresp";
        case FrameKind::Disconnect: return "disconnect";
    }
    return "unknown";
}

const char* to_string(DecodeError::Kind kind) {
    switch (kind) {
        case DecodeError::Kind::UnknownKind: return "unknown_kind";
        case DecodeError::Kind::Truncated: return "truncated";
        case DecodeError::Kind::TrailingBytes: return "trailing_bytes";
        case DecodeError::Kind::Oversize: return "oversize";
        case DecodeError::Kind::BadUtf8: return "bad_utf8";
        case DecodeError::Kind::BadTopic: return "bad_topic";
    }
    return "unknown";
}

bool utf8_valid(std::span<const std::uint8_t> bytes) {
    std::size_t i = 0;
    const std::size_t n = bytes.size();
    while (i < n) {
        const std::uint8_t c = bytes[i];
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t need;
        if ((c & 0xE0) == 0xC0) {
            if (c < 0xC2) return false;  // overlong
            need = 1;
        } else if ((c & 0xF0) == 0xE0) {
            need = 2;
        } else if ((c & 0xF8) == 0xF0) {
            if (c > 0xF4) return false;  // beyond U+10FFFF
            need = 3;
        } else {
            return false;
        }
        if (i + need >= n) return false;
        const std::uint8_t c1 = bytes[i + 1];
        if ((c1 & 0xC0) != 0x80) return false;
        if (c == 0xE0 && c1 < 0xA0) return false;        // overlong 3-byte
        if (c == 0xED && c1 > 0x9F) return false;        // UTF-16 surrogates
        if (c == 0xF0 && c1 < 0x90) return false;        // overlong 4-byte
        if (c == 0xF4 && c1 > 0x8F) return false;        // beyond U+10FFFF
        for (std::size_t k = 2; k <= need; ++k)
            if ((bytes[i + k] & 0xC0) != 0x80) return false;
        i += need + 1;
    }
    return true;
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    if (s.size() > 0xFFFF) throw EncodeError("string field exceeds 65535 bytes");
    put_u16(out, static_cast<std::uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

struct BodyEncoder {
    std::vector<std::uint8_t>& out;

    void operator()(const Connect& f) const {
        put_string(out, f.client_id);
        put_string(out, f.token);
    }
    void operator()(const ConnAck& f) const { out.push_back(f.status); }
    void operator()(const Publish& f) const {
        if (!valid_publish_topic(f.topic))
            throw EncodeError("invalid publish topic '" + f.topic + "'");
        put_string(out, f.topic);
        out.insert(out.end(), f.payload.begin(), f.payload.end());
    }
    void operator()(const Subscribe& f) const {
        if (!valid_filter(f.filter)) throw EncodeError("invalid filter '" + f.filter + "'");
        put_string(out, f.filter);
    }
    void operator()(const SubAck& f) const { out.push_back(f.status); }
    void operator()(const PingReq&) const {}
    void operator()(const PingResp&) const {}
    void operator()(const Disconnect&) const {}
};

class BodyReader {
public:
    explicit BodyReader(std::span<const std::uint8_t> body) : body_(body) {}

    std::size_t remaining() const { return body_.size() - pos_; }

    bool read_string(std::string& out) {
        if (remaining() < 2) return false;
        const std::size_t len =
            (static_cast<std::size_t>(body_[pos_]) << 8) | static_cast<std::size_t>(body_[pos_ + 1]);
        pos_ += 2;
        if (remaining() < len) return false;
        out.assign(reinterpret_cast<const char*>(body_.data() + pos_), len);
        pos_ += len;
        return true;
    }

    std::span<const std::uint8_t> rest() {
        auto r = body_.subspan(pos_);
        pos_ = body_.size();
        return r;
    }

    bool read_byte(std::uint8_t& out) {
        if (remaining() < 1) return false;
        out = body_[pos_++];
        return true;
    }

private:
    std::span<const std::uint8_t> body_;
    std::size_t pos_ = 0;
};

DecodeResult err(DecodeError::Kind kind, std::string detail) {
    return DecodeError{kind, std::move(detail)};
}

bool valid_utf8_str(const std::string& s) {
    return utf8_valid({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& frame, std::size_t max_frame_bytes) {
    std::vector<std::uint8_t> out;
    out.reserve(64);
    out.push_back(static_cast<std::uint8_t>(frame_kind(frame)));
    out.resize(kFrameHeaderBytes);  // body length back-filled below
    std::visit(BodyEncoder{out}, frame);
    const std::size_t body_len = out.size() - kFrameHeaderBytes;
    if (out.size() > max_frame_bytes)
        throw EncodeError("frame of " + std::to_string(out.size()) + " bytes exceeds limit of " +
                          std::to_string(max_frame_bytes));
    out[1] = static_cast<std::uint8_t>((body_len >> 24) & 0xFF);
    out[2] = static_cast<std::uint8_t>((body_len >> 16) & 0xFF);
    out[3] = static_cast<std::uint8_t>((body_len >> 8) & 0xFF);
    out[4] = static_cast<std::uint8_t>(body_len & 0xFF);
    return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> buffer, std::size_t max_frame_bytes) {
    if (buffer.size() < kFrameHeaderBytes)
        return err(DecodeError::Kind::Truncated, "incomplete frame header");

    const std::uint8_t kind_byte = buffer[0];
    if (kind_byte < 1 || kind_byte > 8)
        return err(DecodeError::Kind::UnknownKind, "kind byte " + std::to_string(kind_byte));
    const auto kind = static_cast<FrameKind>(kind_byte);

    const std::uint64_t body_len = (static_cast<std::uint64_t>(buffer[1]) << 24) |
                                   (static_cast<std::uint64_t>(buffer[2]) << 16) |
                                   (static_cast<std::uint64_t>(buffer[3]) << 8) |
                                   static_cast<std::uint64_t>(buffer[4]);
    if (body_len + kFrameHeaderBytes > max_frame_bytes)
        return err(DecodeError::Kind::Oversize,
                   "declared body of " + std::to_string(body_len) + " bytes");
    if (buffer.size() < kFrameHeaderBytes + body_len)
        return err(DecodeError::Kind::Truncated, "body shorter than declared length");
    if (buffer.size() > kFrameHeaderBytes + body_len)
        return err(DecodeError::Kind::TrailingBytes, "bytes beyond declared body length");

    BodyReader body(buffer.subspan(kFrameHeaderBytes, body_len));
    switch (kind) {
        case FrameKind::Connect: {
            Connect f;
            if (!body.read_string(f.client_id) || !body.read_string(f.token))
                return err(DecodeError::Kind::Truncated, "connect strings");
            if (body.remaining() != 0)
                return err(DecodeError::Kind::TrailingBytes, "connect body");
            if (!valid_utf8_str(f.client_id) || !valid_utf8_str(f.token))
                return err(DecodeError::Kind::BadUtf8, "connect strings");
            return Frame{std::move(f)};
        }
        case FrameKind::ConnAck:
        case FrameKind::SubAck: {
            std::uint8_t status;
            if (!body.read_byte(status)) return err(DecodeError::Kind::Truncated, "status byte");
            if (body.remaining() != 0) return err(DecodeError::Kind::TrailingBytes, "status body");
            if (kind == FrameKind::ConnAck) return Frame{ConnAck{status}};
            return Frame{SubAck{status}};
        }
        case FrameKind::Publish: {
            Publish f;
            if (!body.read_string(f.topic))
                return err(DecodeError::Kind::Truncated, "publish topic");
            if (!valid_utf8_str(f.topic)) return err(DecodeError::Kind::BadUtf8, "publish topic");
            if (!valid_publish_topic(f.topic))
                return err(DecodeError::Kind::BadTopic, "publish topic '" + f.topic + "'");
            const auto payload = body.rest();
            f.payload.assign(payload.begin(), payload.end());
            return Frame{std::move(f)};
        }
        case FrameKind::Subscribe: {
            Subscribe f;
            if (!body.read_string(f.filter))
                return err(DecodeError::Kind::Truncated, "subscribe filter");
            if (body.remaining() != 0)
                return err(DecodeError::Kind::TrailingBytes, "subscribe body");
            if (!valid_utf8_str(f.filter)) return err(DecodeError::Kind::BadUtf8, "subscribe filter");
            if (!valid_filter(f.filter))
                return err(DecodeError::Kind::BadTopic, "filter '" + f.filter + "'");
            return Frame{std::move(f)};
        }
        case FrameKind::PingReq:
        case FrameKind::PingResp:
        case FrameKind::Disconnect: {
            if (body.remaining() != 0)
                return err(DecodeError::Kind::TrailingBytes, "body on bodyless frame");
            if (kind == FrameKind::PingReq) return Frame{PingReq{}};
            if (kind == FrameKind::PingResp) return Frame{PingResp{}};
            return Frame{Disconnect{}};
        }
    }
    return err(DecodeError::Kind::UnknownKind, "unreachable");
}

}  // namespace energysaver::wirebus
