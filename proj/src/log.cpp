#include "modsynth/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace modsynth::log {

namespace {

Level from_env()
{
    const char* v = std::getenv("MODSYNTH_LOG");
    if (v == nullptr) {
        return Level::warn;
    }
    const std::string s(v);
    if (s == "error") {
        return Level::error;
    }
    if (s == "info") {
        return Level::info;
    }
    if (s == "debug") {
        return Level::debug;
    }
    return Level::warn;
}

std::atomic<int>& current()
{
    static std::atomic<int> level{static_cast<int>(from_env())};
    return level;
}

const char* name(Level level)
{
    switch (level) {
    case Level::error:
        return "error";
    case Level::warn:
        return "warn";
    case Level::info:
        return "info";
    case Level::debug:
        return "debug";
    }
    return "?";
}

}  // namespace

Level threshold() { return static_cast<Level>(current().load()); }

void set_threshold(Level level) { current().store(static_cast<int>(level)); }

bool enabled(Level level) { return static_cast<int>(level) <= current().load(); }

void write(Level level, std::string_view message)
{
    if (!enabled(level)) {
        return;
    }
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::cerr << "[modsynth " << name(level) << "] " << message << '\n';
}

}  // namespace modsynth::log
