#include "energysaver/forecast/job.hpp"

#include <cmath>

#include "energysaver/forecast/predict.hpp"
#include "energysaver/util/log.hpp"
#include "energysaver/util/time.hpp"

namespace energysaver::forecast {

std::string forecast_store_key(const core::SensorId& sensor) {
    return "__forecast__" + sensor.str();
}

namespace {

nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json j;
    j["mse"] = m.mse;
    j["rmse"] = m.rmse;
    j["mae"] = m.mae;
    return j;
}

nlohmann::json range_to_json(const TimeRange& r) {
    nlohmann::json j;
    j["from_ms"] = r.from_ms;
    j["to_ms"] = r.to_ms;
    return j;
}

}  // namespace

nlohmann::json ForecastReport::to_json() const {
    nlohmann::json j;
    j["sensor"] = sensor;
    j["trained_at_ms"] = trained_at_ms;
    j["train_range"] = range_to_json(train_range);
    j["test_range"] = range_to_json(test_range);
    j["mse"] = one_step.mse;
    j["rmse"] = one_step.rmse;
    j["mae"] = one_step.mae;
    j["one_step"] = metrics_to_json(one_step);
    j["recursive"] = metrics_to_json(recursive);
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& [ts, value] : predictions) preds.push_back({ts, value});
    j["predictions"] = std::move(preds);
    j["epoch_loss"] = epoch_loss;
    j["config"] = config.to_json();
    j["step_ms"] = step_ms;
    j["base_value"] = base_value;
    j["scaler"] = nlohmann::json{{"x_min", scaler_min}, {"x_max", scaler_max}};
    return j;
}

void ForecastRegistry::put(const std::string& sensor, nlohmann::json report) {
    std::lock_guard<std::mutex> lock(mu_);
    latest_[sensor] = std::move(report);
}

std::optional<nlohmann::json> ForecastRegistry::latest(const std::string& sensor) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = latest_.find(sensor);
    if (it == latest_.end()) return std::nullopt;
    return it->second;
}

ForecastReport run_forecast_job(tsstore::Store& store, const core::SensorId& sensor,
                                const JobConfig& config, ForecastRegistry* registry) {
    config.train.validate();
    const int window = config.train.window_len;

    const Series series = aggregate_store_series(store, sensor, config.step_ms);
    if (series.size() <= static_cast<std::size_t>(window))
        throw JobError("forecast for '" + sensor.str() + "' needs more than " +
                       std::to_string(window) + " aggregated points, have " +
                       std::to_string(series.size()));

    // Test side: the calendar month the series ends in.
    const std::int64_t boundary = util::month_floor_ms(series.ts_ms.back());
    if (boundary <= series.ts_ms.front())
        throw JobError("series covers a single month; nothing to hold out for testing");

    auto [train_raw, test_raw] = split_by_boundary(series, boundary);
    if (train_raw.size() <= static_cast<std::size_t>(window))
        throw JobError("training side has " + std::to_string(train_raw.size()) +
                       " points; need more than the window of " + std::to_string(window));

    double base;
    if (const auto month = first_full_month(train_raw, config.step_ms))
        base = mean_in_range(train_raw, month->first, month->second);
    else
        base = mean_in_range(train_raw, train_raw.ts_ms.front(), boundary);
    if (!(base > 0.0))
        throw JobError("fixed-base index is degenerate: first-month mean is not positive");

    const Series indexed = fixed_base_index(series, base);
    const std::size_t train_len = train_raw.size();
    const std::size_t test_len = test_raw.size();

    Scaler scaler = [&] {
        try {
            return Scaler::fit(std::span<const double>(indexed.values).first(train_len));
        } catch (const DegenerateScaler& e) {
            throw JobError(std::string("cannot fit scaler: ") + e.what());
        }
    }();

    const WindowedDataset train_ds = WindowedDataset::make(
        std::span<const double>(indexed.values).first(train_len), scaler, window);
    const WindowedDataset full_ds =
        WindowedDataset::make(std::span<const double>(indexed.values), scaler, window);

    TrainResult trained = train(train_ds, config.train);

    // One-step-ahead over the test month with true history in the window.
    std::vector<double> one_step_pred(test_len);
    std::vector<double> test_actual(test_len);
    LstmCache cache;
    for (std::size_t k = 0; k < test_len; ++k) {
        const std::size_t sample = train_len - static_cast<std::size_t>(window) + k;
        one_step_pred[k] = lstm_forward(trained.model, full_ds.input(sample), cache);
        test_actual[k] = full_ds.target(sample);
    }

    // Recursive forecast of the same horizon from the last training window.
    const auto seed = full_ds.normalized().subspan(train_len - static_cast<std::size_t>(window),
                                                   static_cast<std::size_t>(window));
    const std::vector<double> recursive_pred =
        predict_horizon_normalized(trained.model, seed, static_cast<int>(test_len));

    ForecastReport report;
    report.sensor = sensor.str();
    report.trained_at_ms = config.now_ms ? *config.now_ms : util::now_ms();
    report.train_range = {train_raw.ts_ms.front(), boundary};
    report.test_range = {boundary, test_raw.ts_ms.back() + config.step_ms};
    report.one_step = evaluate(one_step_pred, test_actual);
    report.recursive = evaluate(recursive_pred, test_actual);
    report.predictions.reserve(test_len);
    for (std::size_t k = 0; k < test_len; ++k)
        report.predictions.emplace_back(test_raw.ts_ms[k], scaler.denormalize(recursive_pred[k]));
    report.epoch_loss = std::move(trained.epoch_loss);
    report.config = config.train;
    report.step_ms = config.step_ms;
    report.base_value = base;
    report.scaler_min = scaler.x_min();
    report.scaler_max = scaler.x_max();

    if (config.persist) {
        nlohmann::json doc;
        doc[std::string(core::kFieldSensorId)] = forecast_store_key(sensor);
        doc[std::string(core::kFieldTsMs)] = report.trained_at_ms;
        doc["report_json"] = report.canonical();
        try {
            store.append(tsstore::Document::from_object(std::move(doc)));
        } catch (const tsstore::AppendError& e) {
            if (e.kind() != tsstore::AppendError::Kind::NonMonotonic) throw;
            log::warnf("forecast report for '%s' not persisted: %s", sensor.str().c_str(),
                       e.what());
        }
    }
    if (registry != nullptr) registry->put(sensor.str(), report.to_json());

    log::infof("forecast '%s': one-step rmse %.6f, recursive rmse %.6f over %zu test points",
               sensor.str().c_str(), report.one_step.rmse, report.recursive.rmse, test_len);
    return report;
}

}  // namespace energysaver::forecast
