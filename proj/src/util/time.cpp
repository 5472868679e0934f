#include "energysaver/util/time.hpp"

#include <chrono>
#include <cstdio>

namespace energysaver::util {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    return a - floor_div(a, b) * b;
}

}  // namespace

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
    year -= month <= 2;
    const std::int64_t era = floor_div(year, 400);
    const unsigned yoe = static_cast<unsigned>(year - era * 400);
    const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day) {
    days += 719468;
    const std::int64_t era = floor_div(days, 146097);
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp < 10 ? mp + 3 : mp - 9;
    year = static_cast<int>(y + (month <= 2));
}

int weekday_from_days(std::int64_t days) {
    return static_cast<int>(floor_mod(days + 4, 7));
}

std::int64_t civil_to_epoch_ms(int year, unsigned month, unsigned day, unsigned hour,
                               unsigned minute, unsigned second, unsigned ms) {
    return days_from_civil(year, month, day) * kMsPerDay + hour * kMsPerHour +
           minute * kMsPerMinute + second * kMsPerSecond + ms;
}

std::int64_t month_floor_ms(std::int64_t ts_ms) {
    int y;
    unsigned m, d;
    civil_from_days(floor_div(ts_ms, kMsPerDay), y, m, d);
    return civil_to_epoch_ms(y, m, 1);
}

std::int64_t next_month_start_ms(std::int64_t ts_ms) {
    int y;
    unsigned m, d;
    civil_from_days(floor_div(ts_ms, kMsPerDay), y, m, d);
    if (m == 12) {
        ++y;
        m = 1;
    } else {
        ++m;
    }
    return civil_to_epoch_ms(y, m, 1);
}

std::string format_iso8601_ms(std::int64_t ts_ms) {
    const std::int64_t days = floor_div(ts_ms, kMsPerDay);
    std::int64_t rem = floor_mod(ts_ms, kMsPerDay);
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    const int hh = static_cast<int>(rem / kMsPerHour);
    rem %= kMsPerHour;
    const int mm = static_cast<int>(rem / kMsPerMinute);
    rem %= kMsPerMinute;
    const int ss = static_cast<int>(rem / kMsPerSecond);
    const int ms = static_cast<int>(rem % kMsPerSecond);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", y, m, d, hh, mm, ss, ms);
    return buf;
}

std::optional<std::int64_t> parse_iso8601(std::string_view text) {
    int y = 0;
    unsigned mo = 0, d = 0, hh = 0, mi = 0, ss = 0, ms = 0;
    char buf[64];
    if (text.size() >= sizeof(buf)) return std::nullopt;
    std::snprintf(buf, sizeof(buf), "%.*s", static_cast<int>(text.size()), text.data());

    int n = std::sscanf(buf, "%d-%u-%uT%u:%u:%u.%uZ", &y, &mo, &d, &hh, &mi, &ss, &ms);
    if (n == 7 || n == 6) {
        // n == 6 means no fractional part matched; require the trailing Z.
        if (n == 6) {
            int y2;
            unsigned a, b, c, e, f;
            char z = 0;
            if (std::sscanf(buf, "%d-%u-%uT%u:%u:%u%c", &y2, &a, &b, &c, &e, &f, &z) != 7 || z != 'Z')
                return std::nullopt;
            ms = 0;
        }
    } else if (std::sscanf(buf, "%d-%u-%u", &y, &mo, &d) == 3 && text.size() == 10) {
        hh = mi = ss = ms = 0;
    } else {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mi > 59 || ss > 60 || ms > 999)
        return std::nullopt;
    return civil_to_epoch_ms(y, mo, d, hh, mi, ss, ms);
}

std::int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace energysaver::util
