#include "swsds/wsd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "swsds/sense_key.hpp"

namespace swsds {
namespace {

Pos pos_from_json(const nlohmann::json& j, const PosTagMap& tags) {
  auto tag = j.get<std::string>();
  auto pos = tags.map(tag);
  if (!pos) throw InvalidArgument("unknown POS tag \"" + tag + "\"");
  return *pos;
}

bool better(double score, const std::string& id, double best_score, const std::string& best_id) {
  if (std::abs(score - best_score) > kScoreTieTolerance) return score > best_score;
  return sense_id_less(id, best_id);
}

}  // namespace

void WsdInstance::validate() const {
  if (context.size() != pos_tags.size()) throw InvalidArgument("context and pos_tags differ in length");
  if (target_position >= context.size()) throw InvalidArgument("target_position out of range");
  if (context[target_position] != kTargetToken) throw InvalidArgument("context[target_position] is not <target>");
  if (std::count(context.begin(), context.end(), kTargetToken) != 1)
    throw InvalidArgument("context must contain exactly one <target>");
  if (target_word.empty()) throw InvalidArgument("target_word is empty");
}

WsdInstance WsdInstance::from_json(const nlohmann::json& j, const PosTagMap& tags) {
  WsdInstance inst;
  try {
    if (auto id = j.find("id"); id != j.end()) inst.id = id->is_string() ? id->get<std::string>() : id->dump();
    inst.context = j.at("context").get<std::vector<std::string>>();
    for (const auto& tag : j.at("pos_tags")) inst.pos_tags.push_back(pos_from_json(tag, tags));
    inst.target_word = j.at("target_word").get<std::string>();
    inst.target_position = j.at("target_position").get<std::size_t>();
    inst.target_pos = pos_from_json(j.at("target_pos"), tags);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(e.what());
  }
  inst.validate();
  return inst;
}

nlohmann::json WsdInstance::to_json() const {
  nlohmann::json tags = nlohmann::json::array();
  for (auto p : pos_tags) tags.push_back(to_string(p));
  nlohmann::json j = {{"context", context},
                      {"pos_tags", tags},
                      {"target_word", target_word},
                      {"target_position", target_position},
                      {"target_pos", to_string(target_pos)}};
  if (!id.empty()) j["id"] = id;
  return j;
}

nlohmann::json WsdResult::to_json() const {
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& [id, score] : sense_scores) scores[id] = score ? nlohmann::json(*score) : nlohmann::json(nullptr);
  return {{"chosen", chosen},
          {"sense_scores", scores},
          {"substitutes_used", substitutes_used},
          {"vocab_filter", vocab_filter},
          {"fallback_used", fallback_used},
          {"scorer_calls", scorer_calls}};
}

std::vector<std::string> substitutes_for_sense(const KnowledgeBase& kb, const Sense& sense,
                                               const VocabFilter& filter, std::size_t max_n) {
  std::vector<std::string> out;
  if (max_n == 0) return out;
  for (auto& lemma : kb.synonyms_of(sense)) {
    if (filter && !filter(lemma)) continue;
    out.push_back(std::move(lemma));
    if (out.size() == max_n) break;
  }
  return out;
}

WsdResult disambiguate(const WsdInstance& instance, const KnowledgeBase& kb, Scorer& scorer,
                       const WsdConfig& config) {
  instance.validate();
  if (config.max_substitutes < 1) throw InvalidArgument("max_substitutes must be >= 1");

  auto candidates = kb.senses_of(instance.target_word, instance.target_pos);
  if (candidates.empty()) throw UnknownWordError(instance.target_word, instance.target_pos);

  WsdResult result;
  if (candidates.size() == 1) {
    result.chosen = candidates.front()->sense_id;
    result.sense_scores[result.chosen] = std::nullopt;
    result.substitutes_used[result.chosen] = {};
    return result;
  }

  VocabFilter filter;
  if (scorer.has_vocabulary()) {
    result.vocab_filter = "scorer-vocabulary";
    filter = [&scorer](std::string_view lemma) { return scorer.in_vocabulary(lemma); };
  }

  MaskedQuery query{instance.context, instance.target_position, config.mask_token};
  query.tokens[instance.target_position] = config.mask_token;

  std::optional<double> best;
  for (const Sense* sense : candidates) {
    auto subs = substitutes_for_sense(kb, *sense, filter, config.max_substitutes);
    result.substitutes_used[sense->sense_id] = subs;
    if (subs.empty()) {
      result.sense_scores[sense->sense_id] = std::nullopt;
      continue;
    }
    auto scores = score_candidates(scorer, query, subs);
    ++result.scorer_calls;
    double sum = 0.0;
    for (const auto& lemma : subs) sum += scores.at(lemma);
    const double average = sum / static_cast<double>(subs.size());
    result.sense_scores[sense->sense_id] = average;
    if (!best || better(average, sense->sense_id, *best, result.chosen)) {
      best = average;
      result.chosen = sense->sense_id;
    }
  }
  if (best) return result;

  result.fallback_used = true;
  if (config.fallback == Fallback::first_sense) {
    result.chosen = candidates.front()->sense_id;
    return result;
  }
  // base_word_score: every sense is probed by the target word itself.
  const std::vector<std::string> self{instance.target_word};
  auto scores = score_candidates(scorer, query, self);
  ++result.scorer_calls;
  const double s = scores.at(instance.target_word);
  for (const Sense* sense : candidates) {
    result.sense_scores[sense->sense_id] = s;
    result.substitutes_used[sense->sense_id] = self;
  }
  result.chosen = candidates.front()->sense_id;
  return result;
}

std::string AnnotatedSentence::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

AnnotatedSentence annotate_sentence(const TaggedSentence& sentence, const KnowledgeBase& kb,
                                    const PolysemyDictionary& dict, Scorer& scorer, const WsdConfig& config) {
  AnnotatedSentence out;
  out.tokens = sentence.tokens;
  if (sentence.tokens.size() != sentence.pos_tags.size()) {
    out.failures.push_back({0, "tokens and pos_tags differ in length"});
    return out;
  }
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const auto& token = sentence.tokens[i];
    if (token.find('=') != std::string::npos) continue;
    if (!dict.contains(token, sentence.pos_tags[i])) continue;

    WsdInstance instance;
    instance.context = sentence.tokens;
    instance.context[i] = std::string(kTargetToken);
    instance.pos_tags = sentence.pos_tags;
    instance.target_word = token;
    instance.target_position = i;
    instance.target_pos = sentence.pos_tags[i];
    try {
      auto result = disambiguate(instance, kb, scorer, config);
      out.tokens[i] = make_sense_key(token, result.chosen);
      out.results.emplace_back(i, std::move(result));
    } catch (const Error& e) {
      out.failures.push_back({i, e.what()});
    }
  }
  return out;
}

std::vector<AnnotatedSentence> annotate_corpus(std::span<const TaggedSentence> sentences,
                                               const KnowledgeBase& kb, const PolysemyDictionary& dict,
                                               Scorer& scorer, const WsdConfig& config, unsigned threads) {
  std::vector<AnnotatedSentence> out(sentences.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(sentences.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < sentences.size(); ++i) out[i] = annotate_sentence(sentences[i], kb, dict, scorer, config);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < sentences.size(); i = next++)
          out[i] = annotate_sentence(sentences[i], kb, dict, scorer, config);
      });
    }
  }
  return out;
}

}  // namespace swsds
