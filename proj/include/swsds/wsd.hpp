#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "swsds/errors.hpp"
#include "swsds/kb.hpp"
#include "swsds/pos.hpp"
#include "swsds/scorer.hpp"

namespace swsds {

inline constexpr std::string_view kTargetToken = "<target>";

// Sense averages closer than this are tied; ties go to the smallest sense id.
inline constexpr double kScoreTieTolerance = 1e-12;

// Preprocessed disambiguation task: the target occurrence is replaced by
// "<target>" in context, with POS tags aligned to context.
struct WsdInstance {
  std::string id;
  std::vector<std::string> context;
  std::vector<Pos> pos_tags;
  std::string target_word;
  std::size_t target_position = 0;
  Pos target_pos = Pos::noun;

  void validate() const;

  static WsdInstance from_json(const nlohmann::json& j, const PosTagMap& tags = {});
  nlohmann::json to_json() const;
};

enum class Fallback { first_sense, base_word_score };

struct WsdConfig {
  std::size_t max_substitutes = 10;
  Fallback fallback = Fallback::first_sense;
  std::string mask_token = std::string(kMaskToken);
};

struct WsdResult {
  std::string chosen;
  // Average substitute score per candidate sense; nullopt marks a sense with no substitutes.
  std::map<std::string, std::optional<double>> sense_scores;
  std::map<std::string, std::vector<std::string>> substitutes_used;
  std::string vocab_filter = "accept-all";
  bool fallback_used = false;
  std::size_t scorer_calls = 0;

  nlohmann::json to_json() const;
};

class UnknownWordError : public Error {
 public:
  UnknownWordError(const std::string& lemma, Pos pos)
      : Error("no senses for \"" + lemma + "\" with POS " + to_string(pos)) {}
};

using VocabFilter = std::function<bool(std::string_view)>;

// synonyms_of(kb, sense) that pass the filter, first max_n of them, order preserved.
std::vector<std::string> substitutes_for_sense(const KnowledgeBase& kb, const Sense& sense,
                                               const VocabFilter& filter, std::size_t max_n);

// Picks the candidate sense whose substitutes have the highest average masked-LM
// score in the instance's context. Ties go to the smallest sense id.
WsdResult disambiguate(const WsdInstance& instance, const KnowledgeBase& kb, Scorer& scorer,
                       const WsdConfig& config = {});

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<Pos> pos_tags;
};

struct TokenFailure {
  std::size_t position = 0;
  std::string message;
};

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::vector<std::pair<std::size_t, WsdResult>> results;
  std::vector<TokenFailure> failures;

  std::string text() const;
};

// Replaces every token whose (lemma, pos) is polysemous with "lemma=sense_id".
// Per-token failures are recorded and leave the original token in place.
// Output order matches input order for any thread count.
std::vector<AnnotatedSentence> annotate_corpus(std::span<const TaggedSentence> sentences,
                                               const KnowledgeBase& kb, const PolysemyDictionary& dict,
                                               Scorer& scorer, const WsdConfig& config = {},
                                               unsigned threads = 1);

AnnotatedSentence annotate_sentence(const TaggedSentence& sentence, const KnowledgeBase& kb,
                                    const PolysemyDictionary& dict, Scorer& scorer,
                                    const WsdConfig& config = {});

}  // namespace swsds
