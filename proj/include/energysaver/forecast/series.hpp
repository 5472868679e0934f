#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "energysaver/core/types.hpp"
#include "energysaver/tsstore/store.hpp"

namespace energysaver::forecast {

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Univariate load series: strictly increasing timestamps, one finite value
/// per step.
struct Series {
    core::SensorId sensor;
    std::vector<std::int64_t> ts_ms;
    std::vector<double> values;

    std::size_t size() const { return ts_ms.size(); }
};

void check_series(const Series& series);

/// Rescales every value to 100 * v / base_value; timestamps unchanged.
/// Throws std::domain_error on a non-positive base.
Series fixed_base_index(const Series& series, double base_value);

/// (train, test): points strictly before the boundary and the rest, both in
/// order. Throws SeriesError when either side would be empty.
std::pair<Series, Series> split_by_boundary(const Series& series, std::int64_t boundary_ms);

/// Loads the stored documents for a sensor and sums energy_wh per step_ms
/// bucket (buckets aligned to the epoch). Buckets without readings are
/// skipped. Documents lacking a numeric energy_wh are ignored.
Series aggregate_store_series(const tsstore::Store& store, const core::SensorId& sensor,
                              std::int64_t step_ms);

/// [start, end) of the first calendar month fully covered by the series,
/// given its step; nullopt when no month is fully covered.
std::optional<std::pair<std::int64_t, std::int64_t>> first_full_month(const Series& series,
                                                                      std::int64_t step_ms);

double mean_in_range(const Series& series, std::int64_t from_ms, std::int64_t to_ms);

}  // namespace energysaver::forecast
