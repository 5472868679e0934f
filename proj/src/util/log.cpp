#include "energysaver/util/log.hpp"

#include <atomic>
#include <cstdarg>
#include <cstdio>
#include <mutex>

namespace energysaver::log {

namespace {

std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;

const char* prefix(Level lv) {
    switch (lv) {
        case Level::debug: return "[debug]";
        case Level::info: return "[info]";
        case Level::warn: return "[warn]";
        case Level::error: return "[error]";
    }
    return "[?]";
}

void vlog(Level lv, const char* fmt, va_list args) {
    if (lv < g_level.load(std::memory_order_relaxed)) return;
    char buf[1024];
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "%s %s\n", prefix(lv), buf);
}

}  // namespace

void set_level(Level level) { g_level.store(level, std::memory_order_relaxed); }
Level level() { return g_level.load(std::memory_order_relaxed); }

#define ENERGYSAVER_LOG_BODY(lv)      \
    va_list args;                     \
    va_start(args, fmt);              \
    vlog(lv, fmt, args);              \
    va_end(args)

void debugf(const char* fmt, ...) { ENERGYSAVER_LOG_BODY(Level::debug); }
void infof(const char* fmt, ...) { ENERGYSAVER_LOG_BODY(Level::info); }
void warnf(const char* fmt, ...) { ENERGYSAVER_LOG_BODY(Level::warn); }
void errorf(const char* fmt, ...) { ENERGYSAVER_LOG_BODY(Level::error); }

#undef ENERGYSAVER_LOG_BODY

}  // namespace energysaver::log
