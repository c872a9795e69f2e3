#pragma once

#include <functional>
#include <string_view>

#include <json.hpp>

namespace swsds::log {

enum class Level { debug, info, warn, error };

// Emits one line-delimited JSON event: {"level": ..., "event": ..., <fields>}.
void event(Level level, std::string_view name, nlohmann::json fields = nlohmann::json::object());

inline void warn(std::string_view name, nlohmann::json fields = nlohmann::json::object()) {
  event(Level::warn, name, std::move(fields));
}
inline void info(std::string_view name, nlohmann::json fields = nlohmann::json::object()) {
  event(Level::info, name, std::move(fields));
}

using Sink = std::function<void(const nlohmann::json&)>;

// Replaces the stderr sink; returns the previous one. An empty sink restores stderr.
Sink set_sink(Sink sink);

void set_min_level(Level level);

}  // namespace swsds::log
