#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "energysaver/core/types.hpp"

namespace energysaver::tsstore {

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Schemaless persisted record: a flat JSON object of scalar values with the
/// required keys sensor_id and ts_ms. The canonical form is one line of
/// compact JSON with sorted keys, which nlohmann::json's default object
/// ordering already provides.
class Document {
public:
    static Document from_object(nlohmann::json object);
    static Document from_json_line(std::string_view line);
    static Document from_reading(const core::PowerReading& reading);

    const nlohmann::json& fields() const { return object_; }
    std::int64_t ts_ms() const { return ts_ms_; }
    const std::string& sensor_id() const { return sensor_id_; }

    std::string canonical() const { return object_.dump(); }

    friend bool operator==(const Document& a, const Document& b) { return a.object_ == b.object_; }

private:
    explicit Document(nlohmann::json object);

    nlohmann::json object_;
    std::string sensor_id_;
    std::int64_t ts_ms_ = 0;
};

}  // namespace energysaver::tsstore
