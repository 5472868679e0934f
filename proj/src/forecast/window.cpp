#include "energysaver/forecast/window.hpp"

namespace energysaver::forecast {

WindowedDataset WindowedDataset::make(std::span<const double> values, const Scaler& scaler,
                                      int window_len) {
    if (window_len < 1) throw DatasetError("window length must be >= 1");
    if (values.size() <= static_cast<std::size_t>(window_len))
        throw DatasetError("series of " + std::to_string(values.size()) +
                           " points is too short for window " + std::to_string(window_len) +
                           "; need at least " + std::to_string(window_len + 1));
    std::vector<double> normalized(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) normalized[i] = scaler.normalize(values[i]);
    return WindowedDataset(std::move(normalized), window_len);
}

WindowedDataset WindowedDataset::make(const Series& series, const Scaler& scaler, int window_len) {
    return make(std::span<const double>(series.values), scaler, window_len);
}

}  // namespace energysaver::forecast
