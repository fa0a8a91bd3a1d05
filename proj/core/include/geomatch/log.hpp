#pragma once

#include <string>

namespace geomatch {

// Verbosity selected by the GEOMATCH_LOG environment variable: unset, "0" or
// "quiet" silences everything; "1"/"warn", "2"/"info", "3"/"debug" enable the
// levels up to the named one. Messages go to stderr and never into result
// files, so emitted artifacts stay byte-deterministic at any verbosity.
enum class LogLevel : int { Warn = 1, Info = 2, Debug = 3 };

// Level parsed from the environment once per process.
int log_level();

inline bool log_enabled(LogLevel lv) {
  return log_level() >= static_cast<int>(lv);
}

void log_line(LogLevel lv, const std::string& msg);

}  // namespace geomatch
