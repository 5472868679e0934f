#include "energysaver/util/jsonconfig.hpp"

#include <algorithm>

namespace energysaver::util {

namespace {

std::string joined(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

}  // namespace

void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path) {
    if (!obj.is_object())
        throw ConfigError("config section '" + (path.empty() ? "<root>" : path) +
                          "' must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key: " + joined(path, key));
    }
}

std::string get_string(const nlohmann::json& obj, std::string_view key, const std::string& path,
                       const std::string& fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_string()) throw ConfigError("key " + joined(path, key) + " must be a string");
    return it->get<std::string>();
}

std::int64_t get_int(const nlohmann::json& obj, std::string_view key, const std::string& path,
                     std::int64_t fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer() && !it->is_number_unsigned())
        throw ConfigError("key " + joined(path, key) + " must be an integer");
    return it->get<std::int64_t>();
}

double get_double(const nlohmann::json& obj, std::string_view key, const std::string& path,
                  double fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw ConfigError("key " + joined(path, key) + " must be a number");
    return it->get<double>();
}

std::uint16_t get_port(const nlohmann::json& obj, std::string_view key, const std::string& path,
                       std::uint16_t fallback) {
    const std::int64_t v = get_int(obj, key, path, fallback);
    if (v < 0 || v > 65535)
        throw ConfigError("key " + joined(path, key) + " must be a port in [0, 65535]");
    return static_cast<std::uint16_t>(v);
}

}  // namespace energysaver::util
