#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace swsds {

// Annotated-token form "lemma=sense_id", shared by corpora and embedding keys.
inline std::string make_sense_key(std::string_view lemma, std::string_view sense_id) {
  std::string key;
  key.reserve(lemma.size() + sense_id.size() + 1);
  key.append(lemma).push_back('=');
  key.append(sense_id);
  return key;
}

struct SenseKeyParts {
  std::string_view lemma;
  std::string_view sense_id;
};

// Splits a well-formed sense key: exactly one '=' with non-empty sides.
inline std::optional<SenseKeyParts> split_sense_key(std::string_view token) {
  auto eq = token.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == token.size()) return std::nullopt;
  if (token.find('=', eq + 1) != std::string_view::npos) return std::nullopt;
  return SenseKeyParts{token.substr(0, eq), token.substr(eq + 1)};
}

inline bool is_sense_key(std::string_view token) { return split_sense_key(token).has_value(); }

}  // namespace swsds
