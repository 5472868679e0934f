#pragma once

#include <string>
#include <vector>

#include "energysaver/util/rng.hpp"
#include "energysaver/wirebus/frame.hpp"

namespace testutil {

// Random generators for valid frames, used by the codec round-trip property
// tests. Strings mix ASCII and multi-byte UTF-8.

inline std::string random_utf8(energysaver::util::Rng& rng, std::size_t max_chars) {
    static const char* multibyte[] = {"é", "€", "中", "\U0001F50C"};
    const std::size_t n = rng.bounded(max_chars + 1);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() < 0.9)
            out.push_back(static_cast<char>('a' + rng.bounded(26)));
        else
            out += multibyte[rng.bounded(4)];
    }
    return out;
}

inline std::string random_segment(energysaver::util::Rng& rng) {
    std::string s;
    const std::size_t n = 1 + rng.bounded(8);
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng.bounded(26)));
    return s;
}

inline std::string random_topic(energysaver::util::Rng& rng, bool filter) {
    std::string topic = random_segment(rng);
    const std::size_t extra = rng.bounded(4);
    for (std::size_t i = 0; i < extra; ++i) topic += "/" + random_segment(rng);
    if (filter && rng.uniform() < 0.5) topic += "/#";
    return topic;
}

inline std::vector<std::uint8_t> random_payload(energysaver::util::Rng& rng, std::size_t max_len) {
    std::vector<std::uint8_t> out(rng.bounded(max_len + 1));
    for (auto& b : out) b = static_cast<std::uint8_t>(rng.bounded(256));
    return out;
}

inline energysaver::wirebus::Frame random_frame(energysaver::util::Rng& rng) {
    using namespace energysaver::wirebus;
    switch (rng.bounded(8)) {
        case 0: return Connect{random_utf8(rng, 24), random_utf8(rng, 24)};
        case 1: return ConnAck{static_cast<std::uint8_t>(rng.bounded(256))};
        case 2: return Publish{random_topic(rng, false), random_payload(rng, 512)};
        case 3: return Subscribe{random_topic(rng, true)};
        case 4: return SubAck{static_cast<std::uint8_t>(rng.bounded(256))};
        case 5: return PingReq{};
        case 6: return PingResp{};
        default: return Disconnect{};
    }
}

}  // namespace testutil
