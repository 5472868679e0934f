#include "energysaver/core/json.hpp"

#include <cmath>

#include "energysaver/core/power.hpp"

namespace energysaver::core {

namespace {

double require_number(const nlohmann::json& obj, std::string_view key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw PayloadError("missing field '" + std::string(key) + "'");
    if (!it->is_number()) throw PayloadError("field '" + std::string(key) + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw PayloadError("field '" + std::string(key) + "' must be finite");
    return v;
}

}  // namespace

nlohmann::json reading_to_json(const PowerReading& reading) {
    nlohmann::json obj;
    obj[std::string(kFieldSensorId)] = reading.sensor.str();
    obj[std::string(kFieldTsMs)] = reading.ts_ms;
    obj[std::string(kFieldVoltage)] = reading.voltage_rms;
    obj[std::string(kFieldCurrent)] = reading.current_rms;
    obj[std::string(kFieldPower)] = reading.power_w;
    const double rounded = std::nearbyint(reading.interval_s);
    if (rounded == reading.interval_s && std::abs(rounded) < 9.0e15)
        obj[std::string(kFieldIntervalS)] = static_cast<std::int64_t>(rounded);
    else
        obj[std::string(kFieldIntervalS)] = reading.interval_s;
    obj[std::string(kFieldEnergyWh)] = reading.energy_wh;
    return obj;
}

std::string reading_to_payload(const PowerReading& reading) {
    return reading_to_json(reading).dump();
}

PowerReading reading_from_json(const nlohmann::json& payload) {
    if (!payload.is_object()) throw PayloadError("payload must be a JSON object");

    const auto sensor_it = payload.find(kFieldSensorId);
    if (sensor_it == payload.end() || !sensor_it->is_string())
        throw PayloadError("missing or non-string 'sensor_id'");
    const std::string sensor_str = sensor_it->get<std::string>();
    if (!SensorId::valid(sensor_str)) throw PayloadError("invalid sensor id '" + sensor_str + "'");

    const auto ts_it = payload.find(kFieldTsMs);
    if (ts_it == payload.end() || !(ts_it->is_number_integer() || ts_it->is_number_unsigned()))
        throw PayloadError("missing or non-integer 'ts_ms'");
    const std::int64_t ts_ms = ts_it->get<std::int64_t>();
    if (ts_ms < 0) throw PayloadError("'ts_ms' must be non-negative");

    const double voltage = require_number(payload, kFieldVoltage);
    const double current = require_number(payload, kFieldCurrent);
    const double interval = require_number(payload, kFieldIntervalS);
    if (voltage < 0.0) throw PayloadError("'voltage' must be non-negative");
    if (current < 0.0) throw PayloadError("'current' must be non-negative");
    if (interval <= 0.0) throw PayloadError("'interval_s' must be > 0");

    PowerReading reading{SensorId(sensor_str), ts_ms, voltage, current, 0.0, interval, 0.0};
    reading.power_w = payload.contains(kFieldPower) ? require_number(payload, kFieldPower)
                                                    : instantaneous_power(voltage, current);
    reading.energy_wh = payload.contains(kFieldEnergyWh)
                            ? require_number(payload, kFieldEnergyWh)
                            : interval_energy(std::max(reading.power_w, 0.0), interval);
    return reading;
}

PowerReading reading_from_payload(std::string_view payload) {
    const auto parsed = nlohmann::json::parse(payload, nullptr, false);
    if (parsed.is_discarded()) throw PayloadError("payload is not valid JSON");
    return reading_from_json(parsed);
}

}  // namespace energysaver::core
