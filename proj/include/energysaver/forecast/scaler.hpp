#pragma once

#include <span>
#include <stdexcept>

namespace energysaver::forecast {

class DegenerateScaler : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Min-max scaler: normalize maps [x_min, x_max] onto [0, 1].
class Scaler {
public:
    Scaler(double x_min, double x_max);

    /// Throws DegenerateScaler unless the values contain >= 2 distinct points.
    static Scaler fit(std::span<const double> values);

    double normalize(double v) const { return (v - x_min_) / (x_max_ - x_min_); }
    double denormalize(double u) const { return x_min_ + u * (x_max_ - x_min_); }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }

private:
    double x_min_;
    double x_max_;
};

}  // namespace energysaver::forecast
