#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "energysaver/forecast/train.hpp"
#include "energysaver/ingestd/config.hpp"
#include "energysaver/simdevice/profile.hpp"
#include "energysaver/util/jsonconfig.hpp"

namespace energysaver::cli {

struct WirebusSection {
    std::string listen = "0.0.0.0:1883";
    std::vector<std::string> tokens;
    std::size_t max_frame_bytes = 1024 * 1024;
};

struct ForecastSection {
    forecast::TrainConfig train;
    std::int64_t step_s = 600;
};

struct SimdeviceSection {
    std::string sensor = "s1";
    std::string broker = "127.0.0.1:1883";
    std::string token;
    double interval_s = 600.0;
    std::string start = "2019-01-01T00:00:00Z";
    std::uint64_t count = 0;
    double speedup = 0.0;
    double supply_voltage = 127.0;
    simdevice::LoadProfile profile;
};

/// One JSON file with the per-component sections under namespaced keys.
/// Unknown keys anywhere are rejected with the offending path named.
struct GlobalConfig {
    WirebusSection wirebus;
    ingestd::IngestConfig ingestd;
    ForecastSection forecast;
    SimdeviceSection simdevice;
};

GlobalConfig global_config_from_json(const nlohmann::json& root);
GlobalConfig load_global_config(const std::filesystem::path& path);

simdevice::LoadProfile load_profile_from_json(const nlohmann::json& obj, const std::string& path);
forecast::TrainConfig train_config_from_json(const nlohmann::json& obj, const std::string& path);

}  // namespace energysaver::cli
