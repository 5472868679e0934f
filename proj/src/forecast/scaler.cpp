#include "energysaver/forecast/scaler.hpp"

#include <algorithm>
#include <cmath>

namespace energysaver::forecast {

Scaler::Scaler(double x_min, double x_max) : x_min_(x_min), x_max_(x_max) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
        throw DegenerateScaler("scaler requires finite x_min < x_max");
}

Scaler Scaler::fit(std::span<const double> values) {
    if (values.size() < 2)
        throw DegenerateScaler("scaler fit needs at least two values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*lo < *hi))
        throw DegenerateScaler("scaler fit needs at least two distinct values");
    return Scaler(*lo, *hi);
}

}  // namespace energysaver::forecast
