#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace swsds {

// Closed single-letter tag set of the preprocessed WSD format.
enum class Pos : char {
  noun = 'n',
  verb = 'v',
  adjective = 'a',
  preposition = 'p',
  adverb = 'd',
  conjunction = 'c',
  particle = 'u',
  other = 'x',
};

std::optional<Pos> parse_pos(std::string_view tag);
std::string to_string(Pos pos);

// Translates an external tagset (e.g. "NN", "VV") into the closed tag set.
// Tags already in the closed set pass through unchanged.
class PosTagMap {
 public:
  PosTagMap() = default;

  void add(std::string external, Pos pos) { table_[std::move(external)] = pos; }
  std::optional<Pos> map(std::string_view tag) const;

  // JSON object {"NN": "n", ...}.
  static PosTagMap from_json_file(const std::string& path);

 private:
  std::map<std::string, Pos, std::less<>> table_;
};

}  // namespace swsds
