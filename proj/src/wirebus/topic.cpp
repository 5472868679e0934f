#include "energysaver/wirebus/topic.hpp"

#include <stdexcept>

namespace energysaver::wirebus {

std::vector<std::string_view> topic_segments(std::string_view topic) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = topic.find('/', start);
        if (pos == std::string_view::npos) {
            out.push_back(topic.substr(start));
            return out;
        }
        out.push_back(topic.substr(start, pos - start));
        start = pos + 1;
    }
}

namespace {

bool valid_topic_impl(std::string_view topic, bool allow_trailing_hash) {
    if (topic.empty() || topic.size() > kMaxTopicBytes) return false;
    const auto segs = topic_segments(topic);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (segs[i].empty()) return false;
        if (segs[i].find('#') != std::string_view::npos) {
            if (!allow_trailing_hash) return false;
            if (segs[i] != "#" || i + 1 != segs.size()) return false;
        }
    }
    return true;
}

}  // namespace

bool valid_publish_topic(std::string_view topic) { return valid_topic_impl(topic, false); }

bool valid_filter(std::string_view filter) { return valid_topic_impl(filter, true); }

bool topic_matches(std::string_view filter, std::string_view topic) {
    if (!valid_filter(filter))
        throw std::invalid_argument("invalid filter '" + std::string(filter) + "'");
    const auto f = topic_segments(filter);
    const auto t = topic_segments(topic);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == "#") return true;  // absorbs zero or more remaining segments
        if (i >= t.size() || f[i] != t[i]) return false;
    }
    return f.size() == t.size();
}

std::string reading_topic(const core::SensorId& sensor) {
    return "energysaver/" + sensor.str() + "/reading";
}

}  // namespace energysaver::wirebus
