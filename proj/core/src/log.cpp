#include "geomatch/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace geomatch {

namespace {

int parse_level() {
  const char* env = std::getenv("GEOMATCH_LOG");
  if (env == nullptr) return 0;
  const std::string s(env);
  if (s.empty() || s == "0" || s == "quiet") return 0;
  if (s == "1" || s == "warn") return 1;
  if (s == "2" || s == "info") return 2;
  if (s == "3" || s == "debug") return 3;
  return 1;  // unrecognized value: keep warnings visible
}

}  // namespace

int log_level() {
  static const int lv = parse_level();
  return lv;
}

void log_line(LogLevel lv, const std::string& msg) {
  if (!log_enabled(lv)) return;
  std::fprintf(stderr, "[geomatch] %s\n", msg.c_str());
}

}  // namespace geomatch
