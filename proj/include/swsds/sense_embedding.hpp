#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swsds/embedding_store.hpp"
#include "swsds/errors.hpp"
#include "swsds/kb.hpp"
#include "swsds/sense_key.hpp"

namespace swsds {

struct SenseVectorReport {
  std::string sense_key;
  std::size_t synonyms_requested = 0;
  std::size_t synonyms_with_vectors = 0;
  std::vector<std::string> used_lemmas;

  nlohmann::json to_json() const {
    return {{"sense_key", sense_key},
            {"synonyms_requested", synonyms_requested},
            {"synonyms_with_vectors", synonyms_with_vectors},
            {"used_lemmas", used_lemmas}};
  }
};

class NoSynonymVectorError : public Error {
 public:
  explicit NoSynonymVectorError(const std::string& sense_key)
      : Error("no synonym of " + sense_key + " has a vector"), sense_key_(sense_key) {}
  const std::string& sense_key() const noexcept { return sense_key_; }

 private:
  std::string sense_key_;
};

struct SenseVectorOptions {
  std::size_t k = 10;
  // Divide the synonym sum by k instead of by the number of synonyms used.
  bool strict = false;
};

// Mean of the vectors of the first k synonyms (KB order) that have a vector in the store.
template <typename Scalar>
std::pair<typename BasicEmbeddingStore<Scalar>::Vector, SenseVectorReport> sense_vector(
    const Sense& sense, const KnowledgeBase& kb, const BasicEmbeddingStore<Scalar>& store,
    const SenseVectorOptions& options = {}) {
  using Vector = typename BasicEmbeddingStore<Scalar>::Vector;
  if (options.k < 1) throw InvalidArgument("k must be >= 1");

  SenseVectorReport report;
  report.sense_key = make_sense_key(sense.lemma, sense.sense_id);
  report.synonyms_requested = options.k;

  Vector sum = Vector::Zero(store.dim());
  Vector mean = Vector::Zero(store.dim());  // running mean
  for (const auto& lemma : kb.synonyms_of(sense)) {
    const Vector* v = store.find(lemma);
    if (!v) continue;
    sum += *v;
    report.used_lemmas.push_back(lemma);
    mean += (*v - mean) / static_cast<Scalar>(report.used_lemmas.size());
    if (report.used_lemmas.size() == options.k) break;
  }
  report.synonyms_with_vectors = report.used_lemmas.size();
  if (report.used_lemmas.empty()) throw NoSynonymVectorError(report.sense_key);

  if (options.strict) {
    Vector result = (Scalar(1) / static_cast<Scalar>(options.k)) * sum;
    return {std::move(result), std::move(report)};
  }
  return {std::move(mean), std::move(report)};
}

struct SenseEmbeddingFailure {
  std::string sense_key;
  std::string message;
};

struct EmbedSensesResult {
  std::vector<SenseVectorReport> reports;  // sorted by sense key
  std::vector<SenseEmbeddingFailure> failures;
  std::size_t inserted = 0;
};

// Adds a vector for every distinct sense key in the corpus that the store lacks.
// Keys that cannot be resolved or have no synonym vectors are reported, not inserted.
template <typename Scalar>
EmbedSensesResult embed_senses(std::span<const std::vector<std::string>> corpus, const KnowledgeBase& kb,
                               BasicEmbeddingStore<Scalar>& store, const SenseVectorOptions& options = {}) {
  std::set<std::string> pending;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) {
      if (is_sense_key(token) && !store.contains(token)) pending.insert(token);
    }
  }

  EmbedSensesResult result;
  std::vector<std::pair<std::string, typename BasicEmbeddingStore<Scalar>::Vector>> computed;
  for (const auto& key : pending) {
    auto parts = *split_sense_key(key);
    const Sense* sense = kb.find(parts.sense_id);
    if (!sense) {
      result.failures.push_back({key, "unknown sense id " + std::string(parts.sense_id)});
      continue;
    }
    if (sense->lemma != parts.lemma) {
      result.failures.push_back({key, "sense " + sense->sense_id + " belongs to lemma " + sense->lemma});
      continue;
    }
    try {
      auto [vector, report] = sense_vector(*sense, kb, store, options);
      report.sense_key = key;
      computed.emplace_back(key, std::move(vector));
      result.reports.push_back(std::move(report));
    } catch (const NoSynonymVectorError& e) {
      result.failures.push_back({key, e.what()});
    }
  }
  // Insert after computing so sense vectors depend only on the plain-lemma vectors.
  for (auto& [key, vector] : computed) store.insert(key, std::move(vector));
  result.inserted = computed.size();
  return result;
}

}  // namespace swsds
