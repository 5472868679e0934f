#pragma once

#include <algorithm>
#include <cstdint>

#include "energysaver/util/rng.hpp"
#include "energysaver/util/time.hpp"

namespace energysaver::util {

/// Exponential backoff with +/-20% jitter: base * 2^attempt, capped.
class Backoff {
public:
    Backoff(std::int64_t base_ms, std::int64_t cap_ms)
        : base_ms_(base_ms), cap_ms_(cap_ms), rng_(static_cast<std::uint64_t>(now_ms())) {}

    std::int64_t next_delay_ms() {
        std::int64_t d = base_ms_;
        for (int i = 0; i < attempt_ && d < cap_ms_; ++i) d *= 2;
        d = std::min(d, cap_ms_);
        ++attempt_;
        const double jittered = static_cast<double>(d) * rng_.uniform(0.8, 1.2);
        return std::max<std::int64_t>(1, static_cast<std::int64_t>(jittered));
    }

    void reset() { attempt_ = 0; }

private:
    std::int64_t base_ms_;
    std::int64_t cap_ms_;
    int attempt_ = 0;
    Rng rng_;
};

}  // namespace energysaver::util
