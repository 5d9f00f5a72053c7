#include "iml/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace iml {
namespace {
std::atomic<LogLevel> g_level{LogLevel::warning};
std::mutex g_mutex;

void emit(std::string_view prefix, std::string_view message) {
    std::lock_guard lock(g_mutex);
    std::cerr << prefix << message << '\n';
}
} // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void log_warning(std::string_view message) {
    if (g_level >= LogLevel::warning) emit("[iml] warning: ", message);
}

void log_info(std::string_view message) {
    if (g_level >= LogLevel::info) emit("[iml] ", message);
}

} // namespace iml
