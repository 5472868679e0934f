#include "energysaver/ingestd/stats.hpp"

namespace energysaver::ingestd {

const char* to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::Malformed: return "malformed";
        case RejectReason::VoltageOutOfRange: return "voltage_out_of_range";
        case RejectReason::CurrentOutOfRange: return "current_out_of_range";
        case RejectReason::NonMonotonicTimestamp: return "non_monotonic_timestamp";
        case RejectReason::PowerMismatch: return "power_mismatch";
        case RejectReason::StoreRejected: return "store_rejected";
    }
    return "unknown";
}

void IngestStats::on_rejected(RejectReason reason, std::string_view detail) {
    rejected_[static_cast<std::size_t>(reason)].fetch_add(1, std::memory_order_relaxed);
    std::lock_guard<std::mutex> lock(error_mu_);
    last_error_.assign(detail);
}

std::uint64_t IngestStats::rejected(RejectReason reason) const {
    return rejected_[static_cast<std::size_t>(reason)].load();
}

std::uint64_t IngestStats::rejected_total() const {
    std::uint64_t total = 0;
    for (const auto& counter : rejected_) total += counter.load();
    return total;
}

std::string IngestStats::last_error() const {
    std::lock_guard<std::mutex> lock(error_mu_);
    return last_error_;
}

nlohmann::json IngestStats::to_json() const {
    nlohmann::json rejected = nlohmann::json::object();
    for (std::size_t i = 0; i < kRejectReasonCount; ++i) {
        const auto count = rejected_[i].load();
        if (count > 0) rejected[to_string(static_cast<RejectReason>(i))] = count;
    }
    nlohmann::json j;
    j["received"] = received();
    j["accepted"] = accepted();
    j["rejected"] = std::move(rejected);
    const std::string err = last_error();
    if (err.empty())
        j["last_error"] = nullptr;
    else
        j["last_error"] = err;
    return j;
}

}  // namespace energysaver::ingestd
