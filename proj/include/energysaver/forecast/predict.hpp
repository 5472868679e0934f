#pragma once

#include <span>
#include <vector>

#include "energysaver/forecast/lstm.hpp"
#include "energysaver/forecast/scaler.hpp"

namespace energysaver::forecast {

/// Recursive multi-step forecast on the normalized scale: predict one step,
/// slide the window (drop oldest, append the prediction), repeat.
std::vector<double> predict_horizon_normalized(const LstmModel& model,
                                               std::span<const double> seed_window, int steps);

/// Same, denormalized through the scaler. The seed window is normalized.
std::vector<double> predict_horizon(const LstmModel& model, const Scaler& scaler,
                                    std::span<const double> seed_window, int steps);

}  // namespace energysaver::forecast
