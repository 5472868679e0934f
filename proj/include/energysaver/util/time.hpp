#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace energysaver::util {

inline constexpr std::int64_t kMsPerSecond = 1000;
inline constexpr std::int64_t kMsPerMinute = 60 * kMsPerSecond;
inline constexpr std::int64_t kMsPerHour = 60 * kMsPerMinute;
inline constexpr std::int64_t kMsPerDay = 24 * kMsPerHour;

/// Days since 1970-01-01 for a proleptic-Gregorian civil date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

/// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

/// Day of week for days-since-epoch; 0 = Sunday .. 6 = Saturday.
int weekday_from_days(std::int64_t days);

std::int64_t civil_to_epoch_ms(int year, unsigned month, unsigned day, unsigned hour = 0,
                               unsigned minute = 0, unsigned second = 0, unsigned ms = 0);

/// Start of the UTC month containing ts_ms.
std::int64_t month_floor_ms(std::int64_t ts_ms);

/// Start of the UTC month after the one containing ts_ms.
std::int64_t next_month_start_ms(std::int64_t ts_ms);

/// ISO-8601 UTC with milliseconds, e.g. 2019-08-01T00:00:00.000Z.
std::string format_iso8601_ms(std::int64_t ts_ms);

/// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM:SSZ and YYYY-MM-DDTHH:MM:SS.mmmZ.
std::optional<std::int64_t> parse_iso8601(std::string_view text);

std::int64_t now_ms();

}  // namespace energysaver::util
