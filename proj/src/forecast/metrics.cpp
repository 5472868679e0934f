#include "energysaver/forecast/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace energysaver::forecast {

Metrics evaluate(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.empty()) throw std::invalid_argument("evaluate: empty inputs");
    if (predictions.size() != actuals.size())
        throw std::invalid_argument("evaluate: predictions and actuals differ in length");

    double sq_sum = 0.0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - actuals[i];
        sq_sum += e * e;
        abs_sum += std::abs(e);
    }
    const double n = static_cast<double>(predictions.size());
    Metrics m;
    m.mse = sq_sum / n;
    m.rmse = std::sqrt(m.mse);
    m.mae = abs_sum / n;
    return m;
}

}  // namespace energysaver::forecast
