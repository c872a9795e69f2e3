#include "swsds/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace swsds::log {
namespace {

std::mutex g_mutex;
Sink g_sink;
std::atomic<Level> g_min_level{Level::info};

const char* level_name(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
  }
  return "info";
}

}  // namespace

void event(Level level, std::string_view name, nlohmann::json fields) {
  if (level < g_min_level.load()) return;
  nlohmann::json line = {{"level", level_name(level)}, {"event", std::string(name)}};
  if (fields.is_object()) {
    for (auto& [key, value] : fields.items()) line[key] = value;
  }
  std::lock_guard lock(g_mutex);
  if (g_sink) {
    g_sink(line);
  } else {
    std::cerr << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

Sink set_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  std::swap(g_sink, sink);
  return sink;
}

void set_min_level(Level level) { g_min_level.store(level); }

}  // namespace swsds::log
