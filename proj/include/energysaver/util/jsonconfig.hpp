#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace energysaver::util {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws ConfigError naming the first key of obj not in allowed, as
/// "<path>.<key>" (or "<key>" for the root).
void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path);

std::string get_string(const nlohmann::json& obj, std::string_view key, const std::string& path,
                       const std::string& fallback);
std::int64_t get_int(const nlohmann::json& obj, std::string_view key, const std::string& path,
                     std::int64_t fallback);
double get_double(const nlohmann::json& obj, std::string_view key, const std::string& path,
                  double fallback);
std::uint16_t get_port(const nlohmann::json& obj, std::string_view key, const std::string& path,
                       std::uint16_t fallback);

}  // namespace energysaver::util
