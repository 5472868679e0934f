#pragma once

#include <span>

namespace energysaver::forecast {

struct Metrics {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
};

/// mse = mean((p - a)^2), rmse = sqrt(mse), mae = mean(|p - a|).
/// Throws std::invalid_argument on empty or mismatched inputs.
Metrics evaluate(std::span<const double> predictions, std::span<const double> actuals);

}  // namespace energysaver::forecast
