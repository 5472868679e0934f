#include "energysaver/forecast/predict.hpp"

#include <stdexcept>

namespace energysaver::forecast {

std::vector<double> predict_horizon_normalized(const LstmModel& model,
                                               std::span<const double> seed_window, int steps) {
    if (steps < 1) throw std::invalid_argument("predict_horizon: steps must be >= 1");
    if (seed_window.empty()) throw std::invalid_argument("predict_horizon: empty seed window");

    std::vector<double> window(seed_window.begin(), seed_window.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps));
    LstmCache cache;
    for (int s = 0; s < steps; ++s) {
        const double pred = lstm_forward(model, window, cache);
        out.push_back(pred);
        window.erase(window.begin());
        window.push_back(pred);
    }
    return out;
}

std::vector<double> predict_horizon(const LstmModel& model, const Scaler& scaler,
                                    std::span<const double> seed_window, int steps) {
    auto normalized = predict_horizon_normalized(model, seed_window, steps);
    for (double& v : normalized) v = scaler.denormalize(v);
    return normalized;
}

}  // namespace energysaver::forecast
