#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

namespace energysaver::ingestd {

enum class RejectReason {
    Malformed = 0,
    VoltageOutOfRange,
    CurrentOutOfRange,
    NonMonotonicTimestamp,
    PowerMismatch,
    StoreRejected,
};

inline constexpr std::size_t kRejectReasonCount = 6;

const char* to_string(RejectReason reason);

/// Ingest counters. received == accepted + sum(rejected) holds after every
/// message because exactly one outcome counter is bumped per receipt.
class IngestStats {
public:
    void on_received() { received_.fetch_add(1, std::memory_order_relaxed); }
    void on_accepted() { accepted_.fetch_add(1, std::memory_order_relaxed); }
    void on_rejected(RejectReason reason, std::string_view detail);

    std::uint64_t received() const { return received_.load(); }
    std::uint64_t accepted() const { return accepted_.load(); }
    std::uint64_t rejected(RejectReason reason) const;
    std::uint64_t rejected_total() const;
    std::string last_error() const;

    nlohmann::json to_json() const;

private:
    std::atomic<std::uint64_t> received_{0};
    std::atomic<std::uint64_t> accepted_{0};
    std::array<std::atomic<std::uint64_t>, kRejectReasonCount> rejected_{};
    mutable std::mutex error_mu_;
    std::string last_error_;
};

}  // namespace energysaver::ingestd
