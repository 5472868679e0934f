#include "energysaver/forecast/series.hpp"

#include <cmath>
#include <limits>

#include "energysaver/util/time.hpp"

namespace energysaver::forecast {

void check_series(const Series& series) {
    if (series.ts_ms.size() != series.values.size())
        throw SeriesError("series timestamps and values differ in length");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!std::isfinite(series.values[i])) throw SeriesError("series value is not finite");
        if (i > 0 && series.ts_ms[i] <= series.ts_ms[i - 1])
            throw SeriesError("series timestamps must be strictly increasing");
    }
}

Series fixed_base_index(const Series& series, double base_value) {
    if (!std::isfinite(base_value) || base_value <= 0.0)
        throw std::domain_error("fixed_base_index: base_value must be finite and > 0");
    Series out = series;
    for (double& v : out.values) v = 100.0 * v / base_value;
    return out;
}

std::pair<Series, Series> split_by_boundary(const Series& series, std::int64_t boundary_ms) {
    Series train{series.sensor, {}, {}};
    Series test{series.sensor, {}, {}};
    for (std::size_t i = 0; i < series.size(); ++i) {
        Series& side = series.ts_ms[i] < boundary_ms ? train : test;
        side.ts_ms.push_back(series.ts_ms[i]);
        side.values.push_back(series.values[i]);
    }
    if (train.size() == 0) throw SeriesError("split boundary leaves an empty training side");
    if (test.size() == 0) throw SeriesError("split boundary leaves an empty test side");
    return {std::move(train), std::move(test)};
}

Series aggregate_store_series(const tsstore::Store& store, const core::SensorId& sensor,
                              std::int64_t step_ms) {
    if (step_ms <= 0) throw SeriesError("aggregation step must be > 0");
    Series out{sensor, {}, {}};
    const auto docs =
        store.query_range(sensor.str(), 0, std::numeric_limits<std::int64_t>::max());
    std::int64_t bucket_start = -1;
    double bucket_sum = 0.0;
    bool bucket_open = false;
    for (const auto& doc : docs) {
        const auto it = doc.fields().find(core::kFieldEnergyWh);
        if (it == doc.fields().end() || !it->is_number()) continue;
        const double energy = it->get<double>();
        if (!std::isfinite(energy)) continue;
        const std::int64_t start = (doc.ts_ms() / step_ms) * step_ms;
        if (!bucket_open) {
            bucket_start = start;
            bucket_sum = 0.0;
            bucket_open = true;
        } else if (start != bucket_start) {
            out.ts_ms.push_back(bucket_start);
            out.values.push_back(bucket_sum);
            bucket_start = start;
            bucket_sum = 0.0;
        }
        bucket_sum += energy;
    }
    if (bucket_open) {
        out.ts_ms.push_back(bucket_start);
        out.values.push_back(bucket_sum);
    }
    return out;
}

std::optional<std::pair<std::int64_t, std::int64_t>> first_full_month(const Series& series,
                                                                      std::int64_t step_ms) {
    if (series.size() == 0) return std::nullopt;
    const std::int64_t first_ts = series.ts_ms.front();
    const std::int64_t last_ts = series.ts_ms.back();
    std::int64_t month_start = util::month_floor_ms(first_ts);
    if (first_ts > month_start) month_start = util::next_month_start_ms(first_ts);
    const std::int64_t month_end = util::next_month_start_ms(month_start);
    // Fully covered: the series spans from the month start through its last step.
    if (first_ts <= month_start && last_ts >= month_end - step_ms)
        return std::make_pair(month_start, month_end);
    return std::nullopt;
}

double mean_in_range(const Series& series, std::int64_t from_ms, std::int64_t to_ms) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.ts_ms[i] >= from_ms && series.ts_ms[i] < to_ms) {
            sum += series.values[i];
            ++n;
        }
    }
    if (n == 0) throw SeriesError("mean_in_range: no points in range");
    return sum / static_cast<double>(n);
}

}  // namespace energysaver::forecast
