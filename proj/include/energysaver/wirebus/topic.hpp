#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "energysaver/core/types.hpp"

namespace energysaver::wirebus {

inline constexpr std::size_t kMaxTopicBytes = 256;

/// Splits on '/'. Does not validate; pair with the checks below.
std::vector<std::string_view> topic_segments(std::string_view topic);

/// Non-empty segments, <= 256 bytes, no '#' anywhere. For publish topics.
bool valid_publish_topic(std::string_view topic);

/// Like a publish topic but '#' may appear as the final segment.
bool valid_filter(std::string_view filter);

/// True iff segments are pairwise equal or the filter's trailing '#' absorbs
/// the remaining topic segments (zero or more). Throws std::invalid_argument
/// when the filter is malformed ('#' in a non-final position, empty segment).
bool topic_matches(std::string_view filter, std::string_view topic);

/// Canonical data topic for a sensor: energysaver/<sensor_id>/reading.
std::string reading_topic(const core::SensorId& sensor);

}  // namespace energysaver::wirebus
