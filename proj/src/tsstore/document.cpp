#include "energysaver/tsstore/document.hpp"

#include "energysaver/core/json.hpp"

namespace energysaver::tsstore {

Document::Document(nlohmann::json object) : object_(std::move(object)) {
    if (!object_.is_object()) throw SchemaError("document must be a JSON object");
    for (const auto& [key, value] : object_.items()) {
        if (!(value.is_string() || value.is_boolean() || value.is_number()))
            throw SchemaError("document key '" + key + "' must hold a scalar value");
    }

    const auto sensor_it = object_.find(core::kFieldSensorId);
    if (sensor_it == object_.end() || !sensor_it->is_string())
        throw SchemaError("document requires a string 'sensor_id'");
    sensor_id_ = sensor_it->get<std::string>();
    if (!core::SensorId::valid(sensor_id_))
        throw SchemaError("document 'sensor_id' is not a valid sensor id: '" + sensor_id_ + "'");

    const auto ts_it = object_.find(core::kFieldTsMs);
    if (ts_it == object_.end() || !(ts_it->is_number_integer() || ts_it->is_number_unsigned()))
        throw SchemaError("document requires an integer 'ts_ms'");
    ts_ms_ = ts_it->get<std::int64_t>();
    if (ts_ms_ < 0) throw SchemaError("document 'ts_ms' must be non-negative");
}

Document Document::from_object(nlohmann::json object) { return Document(std::move(object)); }

Document Document::from_json_line(std::string_view line) {
    auto parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded()) throw SchemaError("document line is not valid JSON");
    return Document(std::move(parsed));
}

Document Document::from_reading(const core::PowerReading& reading) {
    return Document(core::reading_to_json(reading));
}

}  // namespace energysaver::tsstore
