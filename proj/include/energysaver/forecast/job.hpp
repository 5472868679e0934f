#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "energysaver/forecast/metrics.hpp"
#include "energysaver/forecast/train.hpp"
#include "energysaver/tsstore/store.hpp"

namespace energysaver::forecast {

class JobError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Store key under which a sensor's forecast reports are persisted. Kept
/// inside the sensor-id alphabet so the documents live in a regular log.
std::string forecast_store_key(const core::SensorId& sensor);

struct TimeRange {
    std::int64_t from_ms = 0;
    std::int64_t to_ms = 0;
};

/// Outcome of one training/prediction run. Top-level metrics are the
/// one-step-ahead test metrics on the normalized scale; the recursive
/// (feed-predictions-back) variant is reported alongside. predictions holds
/// the recursive forecast of the test horizon in index units.
struct ForecastReport {
    std::string sensor;
    std::int64_t trained_at_ms = 0;
    TimeRange train_range;
    TimeRange test_range;
    Metrics one_step;
    Metrics recursive;
    std::vector<std::pair<std::int64_t, double>> predictions;
    std::vector<double> epoch_loss;
    TrainConfig config;
    std::int64_t step_ms = 0;
    double base_value = 0.0;
    // scaler bounds, fitted on the training side only
    double scaler_min = 0.0;
    double scaler_max = 0.0;

    nlohmann::json to_json() const;
    std::string canonical() const { return to_json().dump(); }
};

struct JobConfig {
    TrainConfig train;
    std::int64_t step_ms = 600'000;           // aggregation bucket, default 10 min
    std::optional<std::int64_t> now_ms;       // trained_at override for reproducible runs
    bool persist = true;
};

/// Latest report per sensor, for the HTTP layer.
class ForecastRegistry {
public:
    void put(const std::string& sensor, nlohmann::json report);
    std::optional<nlohmann::json> latest(const std::string& sensor) const;

private:
    mutable std::mutex mu_;
    std::map<std::string, nlohmann::json> latest_;
};

/// Full pipeline for one sensor: aggregate stored readings to step_ms,
/// fixed-base index (base = mean of the first full training month), split at
/// the most recent month boundary, fit the scaler on the training side only,
/// train, evaluate one-step and recursive test predictions, persist the
/// report and register it. Throws JobError when the store holds too little
/// data.
ForecastReport run_forecast_job(tsstore::Store& store, const core::SensorId& sensor,
                                const JobConfig& config, ForecastRegistry* registry = nullptr);

}  // namespace energysaver::forecast
