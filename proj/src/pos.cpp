#include "swsds/pos.hpp"

#include <fstream>

#include <json.hpp>

#include "swsds/errors.hpp"

namespace swsds {

std::optional<Pos> parse_pos(std::string_view tag) {
  if (tag.size() != 1) return std::nullopt;
  switch (tag[0]) {
    case 'n': return Pos::noun;
    case 'v': return Pos::verb;
    case 'a': return Pos::adjective;
    case 'p': return Pos::preposition;
    case 'd': return Pos::adverb;
    case 'c': return Pos::conjunction;
    case 'u': return Pos::particle;
    case 'x': return Pos::other;
    default: return std::nullopt;
  }
}

std::string to_string(Pos pos) { return std::string(1, static_cast<char>(pos)); }

std::optional<Pos> PosTagMap::map(std::string_view tag) const {
  if (auto it = table_.find(tag); it != table_.end()) return it->second;
  return parse_pos(tag);
}

PosTagMap PosTagMap::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open POS map " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  if (!doc.is_object()) throw ParseError(path, 0, "POS map must be a JSON object");
  PosTagMap result;
  for (auto& [external, value] : doc.items()) {
    auto pos = value.is_string() ? parse_pos(value.get<std::string>()) : std::nullopt;
    if (!pos) throw ParseError(path, 0, "unknown target tag for \"" + external + "\"");
    result.add(external, *pos);
  }
  return result;
}

}  // namespace swsds
