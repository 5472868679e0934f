#include "energysaver/cliconfig.hpp"

#include <fstream>

namespace energysaver::cli {

using util::ConfigError;

simdevice::LoadProfile load_profile_from_json(const nlohmann::json& obj, const std::string& path) {
    util::reject_unknown_keys(obj,
                              {"base_power_w", "weekday_factor", "weekend_factor",
                               "diurnal_amplitude", "spike_probability", "spike_multiplier",
                               "noise_sigma", "seed"},
                              path);
    simdevice::LoadProfile p;
    p.base_power_w = util::get_double(obj, "base_power_w", path, p.base_power_w);
    p.weekday_factor = util::get_double(obj, "weekday_factor", path, p.weekday_factor);
    p.weekend_factor = util::get_double(obj, "weekend_factor", path, p.weekend_factor);
    p.diurnal_amplitude = util::get_double(obj, "diurnal_amplitude", path, p.diurnal_amplitude);
    p.spike_probability = util::get_double(obj, "spike_probability", path, p.spike_probability);
    p.spike_multiplier = util::get_double(obj, "spike_multiplier", path, p.spike_multiplier);
    p.noise_sigma = util::get_double(obj, "noise_sigma", path, p.noise_sigma);
    p.seed = static_cast<std::uint64_t>(util::get_int(obj, "seed", path, static_cast<std::int64_t>(p.seed)));
    simdevice::check_profile(p);
    return p;
}

forecast::TrainConfig train_config_from_json(const nlohmann::json& obj, const std::string& path) {
    util::reject_unknown_keys(
        obj, {"window", "epochs", "batch", "hidden", "learning_rate", "optimizer", "seed", "step_s"},
        path);
    forecast::TrainConfig cfg;
    cfg.window_len = static_cast<int>(util::get_int(obj, "window", path, cfg.window_len));
    cfg.epochs = static_cast<int>(util::get_int(obj, "epochs", path, cfg.epochs));
    cfg.batch_size = static_cast<int>(util::get_int(obj, "batch", path, cfg.batch_size));
    cfg.hidden_size = static_cast<int>(util::get_int(obj, "hidden", path, cfg.hidden_size));
    cfg.learning_rate = util::get_double(obj, "learning_rate", path, cfg.learning_rate);
    cfg.optimizer =
        forecast::optimizer_from_string(util::get_string(obj, "optimizer", path, "adam"));
    cfg.seed = static_cast<std::uint64_t>(util::get_int(obj, "seed", path, static_cast<std::int64_t>(cfg.seed)));
    cfg.validate();
    return cfg;
}

GlobalConfig global_config_from_json(const nlohmann::json& root) {
    util::reject_unknown_keys(root, {"wirebus", "ingestd", "forecast", "simdevice"}, "");
    GlobalConfig cfg;

    if (const auto it = root.find("wirebus"); it != root.end()) {
        util::reject_unknown_keys(*it, {"listen", "tokens", "max_frame_bytes"}, "wirebus");
        cfg.wirebus.listen = util::get_string(*it, "listen", "wirebus", cfg.wirebus.listen);
        if (const auto tokens = it->find("tokens"); tokens != it->end()) {
            if (!tokens->is_array()) throw ConfigError("key wirebus.tokens must be an array");
            for (const auto& token : *tokens) {
                if (!token.is_string())
                    throw ConfigError("wirebus.tokens entries must be strings");
                cfg.wirebus.tokens.push_back(token.get<std::string>());
            }
        }
        const auto max_bytes = util::get_int(*it, "max_frame_bytes", "wirebus",
                                             static_cast<std::int64_t>(cfg.wirebus.max_frame_bytes));
        if (max_bytes < 64) throw ConfigError("wirebus.max_frame_bytes must be >= 64");
        cfg.wirebus.max_frame_bytes = static_cast<std::size_t>(max_bytes);
    }

    if (const auto it = root.find("ingestd"); it != root.end())
        cfg.ingestd = ingestd::ingest_config_from_json(*it);

    if (const auto it = root.find("forecast"); it != root.end()) {
        cfg.forecast.train = train_config_from_json(*it, "forecast");
        cfg.forecast.step_s = util::get_int(*it, "step_s", "forecast", cfg.forecast.step_s);
        if (cfg.forecast.step_s <= 0) throw ConfigError("forecast.step_s must be > 0");
    }

    if (const auto it = root.find("simdevice"); it != root.end()) {
        util::reject_unknown_keys(*it,
                                  {"sensor", "broker", "token", "interval_s", "start", "count",
                                   "speedup", "supply_voltage", "profile"},
                                  "simdevice");
        auto& sim = cfg.simdevice;
        sim.sensor = util::get_string(*it, "sensor", "simdevice", sim.sensor);
        sim.broker = util::get_string(*it, "broker", "simdevice", sim.broker);
        sim.token = util::get_string(*it, "token", "simdevice", sim.token);
        sim.interval_s = util::get_double(*it, "interval_s", "simdevice", sim.interval_s);
        sim.start = util::get_string(*it, "start", "simdevice", sim.start);
        sim.count = static_cast<std::uint64_t>(
            util::get_int(*it, "count", "simdevice", static_cast<std::int64_t>(sim.count)));
        sim.speedup = util::get_double(*it, "speedup", "simdevice", sim.speedup);
        sim.supply_voltage = util::get_double(*it, "supply_voltage", "simdevice", sim.supply_voltage);
        if (const auto profile = it->find("profile"); profile != it->end())
            sim.profile = load_profile_from_json(*profile, "simdevice.profile");
    }
    return cfg;
}

GlobalConfig load_global_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    const auto parsed = nlohmann::json::parse(in, nullptr, false);
    if (parsed.is_discarded())
        throw ConfigError("config file '" + path.string() + "' is not valid JSON");
    return global_config_from_json(parsed);
}

}  // namespace energysaver::cli
