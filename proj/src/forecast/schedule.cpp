#include "energysaver/forecast/schedule.hpp"

#include <atomic>
#include <condition_variable>
#include <ctime>
#include <mutex>
#include <thread>

#include "energysaver/util/log.hpp"
#include "energysaver/util/time.hpp"

namespace energysaver::forecast {

int first_business_day(int year, unsigned month) {
    int day = 1;
    while (true) {
        const int wd = util::weekday_from_days(util::days_from_civil(year, month, day));
        if (wd != 0 && wd != 6) return day;  // 0 = Sunday, 6 = Saturday
        ++day;
    }
}

std::int64_t monthly_fire_time_ms(int year, unsigned month, int fire_hour) {
    std::tm tmv{};
    tmv.tm_year = year - 1900;
    tmv.tm_mon = static_cast<int>(month) - 1;
    tmv.tm_mday = first_business_day(year, month);
    tmv.tm_hour = fire_hour;
    tmv.tm_isdst = -1;
    const std::time_t t = std::mktime(&tmv);
    return static_cast<std::int64_t>(t) * 1000;
}

struct MonthlyScheduler::Impl {
    SchedulerClock clock;
    std::function<void()> job;
    int fire_hour = 2;

    std::thread thread;
    std::atomic<bool> stopping{false};
    std::atomic<std::uint64_t> run_count{0};

    std::mutex cv_mu;
    std::condition_variable cv;

    void default_sleep(std::int64_t ms) {
        std::unique_lock<std::mutex> lock(cv_mu);
        cv.wait_for(lock, std::chrono::milliseconds(ms), [this] { return stopping.load(); });
    }

    static void local_year_month_day(std::int64_t ts_ms, int& year, unsigned& month, int& day) {
        const std::time_t t = static_cast<std::time_t>(ts_ms / 1000);
        std::tm lt{};
        localtime_r(&t, &lt);
        year = lt.tm_year + 1900;
        month = static_cast<unsigned>(lt.tm_mon + 1);
        day = lt.tm_mday;
    }

    static void next_month(int& year, unsigned& month) {
        if (month == 12) {
            ++year;
            month = 1;
        } else {
            ++month;
        }
    }

    void loop() {
        bool have_last = false;
        int last_year = 0;
        unsigned last_month = 0;

        while (!stopping.load()) {
            const std::int64_t now = clock.now_ms();
            int year;
            unsigned month;
            int day;
            local_year_month_day(now, year, month, day);

            int target_year = year;
            unsigned target_month = month;
            std::int64_t target;
            const std::int64_t fire = monthly_fire_time_ms(year, month, fire_hour);
            if (have_last && last_year == year && last_month == month) {
                next_month(target_year, target_month);
                target = monthly_fire_time_ms(target_year, target_month, fire_hour);
            } else if (now <= fire) {
                target = fire;
            } else if (day == first_business_day(year, month)) {
                target = now;  // started later on the fire day: catch up now
            } else {
                next_month(target_year, target_month);
                target = monthly_fire_time_ms(target_year, target_month, fire_hour);
            }

            while (!stopping.load() && clock.now_ms() < target)
                clock.sleep_ms(target - clock.now_ms());
            if (stopping.load()) break;

            try {
                job();
            } catch (const std::exception& e) {
                log::errorf("scheduled job failed: %s", e.what());
            }
            run_count.fetch_add(1);
            have_last = true;
            last_year = target_year;
            last_month = target_month;
        }
    }
};

MonthlyScheduler::MonthlyScheduler() : impl_(std::make_unique<Impl>()) {}

MonthlyScheduler::~MonthlyScheduler() { stop(); }

std::unique_ptr<MonthlyScheduler> MonthlyScheduler::start(std::function<void()> job,
                                                          SchedulerClock clock, int fire_hour) {
    auto scheduler = std::unique_ptr<MonthlyScheduler>(new MonthlyScheduler());
    auto& impl = *scheduler->impl_;
    impl.job = std::move(job);
    impl.fire_hour = fire_hour;
    impl.clock = std::move(clock);
    if (!impl.clock.now_ms) impl.clock.now_ms = util::now_ms;
    if (!impl.clock.sleep_ms) impl.clock.sleep_ms = [&impl](std::int64_t ms) { impl.default_sleep(ms); };
    impl.thread = std::thread([&impl] { impl.loop(); });
    return scheduler;
}

void MonthlyScheduler::stop() {
    if (!impl_) return;
    {
        // Flag and notify under the sleep mutex so a sleeper between its
        // predicate check and the wait cannot miss the wakeup.
        std::lock_guard<std::mutex> lock(impl_->cv_mu);
        if (impl_->stopping.exchange(true)) return;
    }
    impl_->cv.notify_all();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::uint64_t MonthlyScheduler::runs() const { return impl_->run_count.load(); }

}  // namespace energysaver::forecast
