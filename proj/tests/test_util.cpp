#include <doctest.h>

#include "energysaver/util/rng.hpp"
#include "energysaver/util/time.hpp"
#include "testutil.hpp"

using namespace energysaver;

TEST_CASE("civil date round trip and weekday agree with the Sakamoto oracle") {
    for (int year = 1999; year <= 2031; ++year) {
        for (unsigned month = 1; month <= 12; ++month) {
            const std::int64_t days = util::days_from_civil(year, month, 1);
            int y;
            unsigned m, d;
            util::civil_from_days(days, y, m, d);
            CHECK(y == year);
            CHECK(m == month);
            CHECK(d == 1);
            CHECK(util::weekday_from_days(days) ==
                  testutil::weekday_oracle(year, static_cast<int>(month), 1));
        }
    }
    CHECK(util::days_from_civil(1970, 1, 1) == 0);
    CHECK(util::weekday_from_days(0) == 4);  // 1970-01-01 was a Thursday
}

TEST_CASE("iso8601 formatting") {
    CHECK(util::format_iso8601_ms(0) == "1970-01-01T00:00:00.000Z");
    CHECK(util::format_iso8601_ms(util::civil_to_epoch_ms(2019, 8, 1)) ==
          "2019-08-01T00:00:00.000Z");
    CHECK(util::format_iso8601_ms(util::civil_to_epoch_ms(2019, 12, 31, 23, 59, 59, 999)) ==
          "2019-12-31T23:59:59.999Z");
}

TEST_CASE("iso8601 parsing inverts formatting") {
    const std::int64_t stamps[] = {0, 123, util::civil_to_epoch_ms(2019, 1, 1),
                                   util::civil_to_epoch_ms(2024, 2, 29, 12, 30, 15, 250)};
    for (const auto ts : stamps) {
        const auto parsed = util::parse_iso8601(util::format_iso8601_ms(ts));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == ts);
    }
    CHECK(util::parse_iso8601("2019-01-01") == util::civil_to_epoch_ms(2019, 1, 1));
    CHECK(util::parse_iso8601("2019-01-01T06:00:00Z") ==
          util::civil_to_epoch_ms(2019, 1, 1, 6));
    CHECK_FALSE(util::parse_iso8601("not a date").has_value());
    CHECK_FALSE(util::parse_iso8601("2019-13-01").has_value());
    CHECK_FALSE(util::parse_iso8601("2019-01-01T06:00:00").has_value());
}

TEST_CASE("month boundaries") {
    const auto mid_aug = util::civil_to_epoch_ms(2019, 8, 17, 13, 5);
    CHECK(util::month_floor_ms(mid_aug) == util::civil_to_epoch_ms(2019, 8, 1));
    CHECK(util::next_month_start_ms(mid_aug) == util::civil_to_epoch_ms(2019, 9, 1));
    const auto dec = util::civil_to_epoch_ms(2019, 12, 31, 23, 59);
    CHECK(util::next_month_start_ms(dec) == util::civil_to_epoch_ms(2020, 1, 1));
    const auto exact = util::civil_to_epoch_ms(2019, 3, 1);
    CHECK(util::month_floor_ms(exact) == exact);
}

TEST_CASE("rng determinism and ranges") {
    util::Rng a(42), b(42), c(43);
    bool all_equal = true;
    bool any_diff_seed = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff_seed = true;
    }
    CHECK(all_equal);
    CHECK(any_diff_seed);

    util::Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double g = r.gaussian();
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("keyed stream is a pure function of (seed, key)") {
    util::KeyedStream a(1, 1000), b(1, 1000), c(1, 2000), d(2, 1000);
    CHECK(a.next_u64() == b.next_u64());
    const auto av = a.next_u64();
    CHECK(av == b.next_u64());
    CHECK(av != c.next_u64());
    CHECK(av != d.next_u64());
}
