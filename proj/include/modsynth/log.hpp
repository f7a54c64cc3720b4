#pragma once

#include <string_view>

namespace modsynth::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Threshold from MODSYNTH_LOG (error, warn, info, debug); warn by default.
Level threshold();
void set_threshold(Level level);
bool enabled(Level level);
void write(Level level, std::string_view message);

inline void warn(std::string_view m) { write(Level::warn, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void debug(std::string_view m) { write(Level::debug, m); }

}  // namespace modsynth::log
