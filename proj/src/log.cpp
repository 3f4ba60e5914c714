#include "reportqa/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

#include "reportqa/error.hpp"

namespace reportqa {

namespace {
std::atomic<int> g_level{static_cast<int>(LogLevel::warn)};
std::mutex g_mutex;

void emit(LogLevel level, const char* tag, std::string_view msg) {
    if (static_cast<int>(level) < g_level.load(std::memory_order_relaxed)) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "[" << tag << "] " << msg << "\n";
}
}  // namespace

void set_log_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

LogLevel log_level_from_string(std::string_view s) {
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    if (s == "warn") return LogLevel::warn;
    if (s == "error") return LogLevel::error;
    if (s == "off") return LogLevel::off;
    throw Error("unknown log level \"" + std::string(s) + "\"");
}

void log_debug(std::string_view msg) { emit(LogLevel::debug, "debug", msg); }
void log_info(std::string_view msg) { emit(LogLevel::info, "info", msg); }
void log_warn(std::string_view msg) { emit(LogLevel::warn, "warn", msg); }
void log_error(std::string_view msg) { emit(LogLevel::error, "error", msg); }

}  // namespace reportqa
