#include "pixshuf/log.hpp"

#include <atomic>
#include <cstdarg>
#include <cstdlib>
#include <cstring>

namespace pixshuf::log {

namespace {

Level parse_env() {
    const char* env = std::getenv("PIXSHUF_LOG");
    if (env == nullptr) return Level::Info;
    if (std::strcmp(env, "error") == 0) return Level::Error;
    if (std::strcmp(env, "debug") == 0) return Level::Debug;
    return Level::Info;
}

std::atomic<int>& level_store() {
    static std::atomic<int> lv{static_cast<int>(parse_env())};
    return lv;
}

} // namespace

Level level() { return static_cast<Level>(level_store().load(std::memory_order_relaxed)); }

void set_level(Level lv) { level_store().store(static_cast<int>(lv), std::memory_order_relaxed); }

bool enabled(Level lv) { return static_cast<int>(lv) <= static_cast<int>(level()); }

void emit(Level lv, const char* fmt, ...) {
    if (!enabled(lv)) return;
    std::va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    va_end(args);
    std::fputc('\n', stderr);
}

} // namespace pixshuf::log
