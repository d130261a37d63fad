#pragma once

#include <cstdio>

namespace pixshuf::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

// Current verbosity; initialized from PIXSHUF_LOG (error|info|debug) on first use.
Level level();
void set_level(Level lv);

bool enabled(Level lv);

// printf-style, always to stderr.
void emit(Level lv, const char* fmt, ...);

#define PIXSHUF_LOG_ERROR(...) ::pixshuf::log::emit(::pixshuf::log::Level::Error, __VA_ARGS__)
#define PIXSHUF_LOG_INFO(...) ::pixshuf::log::emit(::pixshuf::log::Level::Info, __VA_ARGS__)
#define PIXSHUF_LOG_DEBUG(...) ::pixshuf::log::emit(::pixshuf::log::Level::Debug, __VA_ARGS__)

} // namespace pixshuf::log
