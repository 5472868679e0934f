#include "energysaver/ingestd/config.hpp"

#include "energysaver/util/jsonconfig.hpp"
#include "energysaver/wirebus/socket.hpp"
#include "energysaver/wirebus/topic.hpp"

namespace energysaver::ingestd {

using util::ConfigError;

void IngestConfig::validate() const {
    if (!wirebus::valid_filter(topic_filter))
        throw ConfigError("ingestd: invalid topic filter '" + topic_filter + "'");
    core::check_profile(default_profile);
    for (const auto& profile : profiles) core::check_profile(profile);
    if (data_dir.empty()) throw ConfigError("ingestd: data_dir must not be empty");
}

core::SensorProfile IngestConfig::profile_for(const core::SensorId& sensor) const {
    for (const auto& profile : profiles)
        if (profile.sensor == sensor) return profile;
    core::SensorProfile p = default_profile;
    p.sensor = sensor;
    return p;
}

core::SensorProfile sensor_profile_from_json(const nlohmann::json& obj, const std::string& path) {
    util::reject_unknown_keys(obj, {"sensor_id", "v_min", "v_max", "i_min", "i_max", "max_gap_s"},
                              path);
    const std::string id = util::get_string(obj, "sensor_id", path, "");
    if (id.empty()) throw ConfigError("key " + path + ".sensor_id is required");
    core::SensorProfile profile{core::SensorId(id)};
    profile.v_min = util::get_double(obj, "v_min", path, profile.v_min);
    profile.v_max = util::get_double(obj, "v_max", path, profile.v_max);
    profile.i_min = util::get_double(obj, "i_min", path, profile.i_min);
    profile.i_max = util::get_double(obj, "i_max", path, profile.i_max);
    profile.max_gap_s = util::get_double(obj, "max_gap_s", path, profile.max_gap_s);
    core::check_profile(profile);
    return profile;
}

IngestConfig ingest_config_from_json(const nlohmann::json& section) {
    static const std::string path = "ingestd";
    util::reject_unknown_keys(section,
                              {"broker", "broker_token", "topic_filter", "data_dir", "http_listen",
                               "api_tokens", "profiles", "backoff_base_ms", "backoff_cap_ms"},
                              path);
    IngestConfig cfg;
    const std::string broker = util::get_string(section, "broker", path, "");
    if (!broker.empty()) {
        const auto [host, port] = wirebus::split_host_port(broker, cfg.broker_port);
        cfg.broker_host = host;
        cfg.broker_port = port;
    }
    cfg.broker_token = util::get_string(section, "broker_token", path, cfg.broker_token);
    cfg.topic_filter = util::get_string(section, "topic_filter", path, cfg.topic_filter);
    cfg.data_dir = util::get_string(section, "data_dir", path, cfg.data_dir.string());
    const std::string http = util::get_string(section, "http_listen", path, "");
    if (!http.empty()) {
        const auto [host, port] = wirebus::split_host_port(http, cfg.http_port);
        cfg.http_host = host.empty() ? cfg.http_host : host;
        cfg.http_port = port;
    }
    if (const auto it = section.find("api_tokens"); it != section.end()) {
        if (!it->is_array()) throw ConfigError("key ingestd.api_tokens must be an array");
        for (const auto& token : *it) {
            if (!token.is_string()) throw ConfigError("ingestd.api_tokens entries must be strings");
            cfg.api_tokens.push_back(token.get<std::string>());
        }
    }
    if (const auto it = section.find("profiles"); it != section.end()) {
        if (!it->is_array()) throw ConfigError("key ingestd.profiles must be an array");
        std::size_t index = 0;
        for (const auto& entry : *it)
            cfg.profiles.push_back(
                sensor_profile_from_json(entry, path + ".profiles[" + std::to_string(index++) + "]"));
    }
    cfg.backoff_base_ms = util::get_int(section, "backoff_base_ms", path, cfg.backoff_base_ms);
    cfg.backoff_cap_ms = util::get_int(section, "backoff_cap_ms", path, cfg.backoff_cap_ms);
    cfg.validate();
    return cfg;
}

}  // namespace energysaver::ingestd
