#pragma once

#include <cstdint>
#include <functional>
#include <memory>

namespace energysaver::forecast {

/// Earliest day of the month that is neither Saturday nor Sunday (holidays
/// deliberately ignored). 1-based day of month.
int first_business_day(int year, unsigned month);

/// Injectable time source so the scheduler is testable with a fake clock.
/// sleep_ms may return early (e.g. when the scheduler is stopping).
struct SchedulerClock {
    std::function<std::int64_t()> now_ms;
    std::function<void(std::int64_t)> sleep_ms;
};

/// Fires the job once per month at fire_hour local time on the first business
/// day. If started later that same day it catches up and runs immediately;
/// started after that day, it waits for the next month.
class MonthlyScheduler {
public:
    /// A default-constructed clock uses the system clock and an
    /// interruptible sleep.
    static std::unique_ptr<MonthlyScheduler> start(std::function<void()> job,
                                                   SchedulerClock clock = {}, int fire_hour = 2);

    ~MonthlyScheduler();
    MonthlyScheduler(const MonthlyScheduler&) = delete;
    MonthlyScheduler& operator=(const MonthlyScheduler&) = delete;

    void stop();

    /// Number of times the job has run.
    std::uint64_t runs() const;

private:
    MonthlyScheduler();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Local-time fire instant for (year, month) at fire_hour on the first
/// business day; exposed for tests.
std::int64_t monthly_fire_time_ms(int year, unsigned month, int fire_hour);

}  // namespace energysaver::forecast
