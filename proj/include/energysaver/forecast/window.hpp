#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "energysaver/forecast/scaler.hpp"
#include "energysaver/forecast/series.hpp"

namespace energysaver::forecast {

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sliding-window supervised pairs over a normalized series. Sample i is
/// (values[i .. i+window), values[i+window]); there are len - window samples.
class WindowedDataset {
public:
    static WindowedDataset make(std::span<const double> values, const Scaler& scaler,
                                int window_len);
    static WindowedDataset make(const Series& series, const Scaler& scaler, int window_len);

    std::size_t size() const { return normalized_.size() - static_cast<std::size_t>(window_len_); }
    int window_len() const { return window_len_; }

    std::span<const double> input(std::size_t i) const {
        return std::span<const double>(normalized_).subspan(i, static_cast<std::size_t>(window_len_));
    }
    double target(std::size_t i) const { return normalized_[i + static_cast<std::size_t>(window_len_)]; }

    std::span<const double> normalized() const { return normalized_; }

private:
    WindowedDataset(std::vector<double> normalized, int window_len)
        : normalized_(std::move(normalized)), window_len_(window_len) {}

    std::vector<double> normalized_;
    int window_len_;
};

}  // namespace energysaver::forecast
