#pragma once

#include <iostream>
#include <string_view>

namespace openuas::log {

enum class Level { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level& threshold() {
  static Level level = Level::Warn;
  return level;
}

inline void write(Level level, std::string_view tag, std::string_view msg) {
  if (static_cast<int>(level) <= static_cast<int>(threshold())) std::cerr << '[' << tag << "] " << msg << '\n';
}

inline void warn(std::string_view msg) { write(Level::Warn, "warn", msg); }
inline void info(std::string_view msg) { write(Level::Info, "info", msg); }
inline void debug(std::string_view msg) { write(Level::Debug, "debug", msg); }

}  // namespace openuas::log
