#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsds/embedding_store.hpp"
#include "swsds/io.hpp"
#include "swsds/kb.hpp"
#include "swsds/scorer.hpp"
#include "swsds/sense_embedding.hpp"
#include "swsds/wmd.hpp"
#include "swsds/wsd.hpp"

namespace swsds {

// ---- WSD scoring -----------------------------------------------------------

struct WsdGoldItem {
  WsdInstance instance;
  std::string gold_sense_id;
  // Further acceptable senses for multi-gold datasets; empty in single-label mode.
  std::vector<std::string> alternative_gold;

  static WsdGoldItem from_json(const nlohmann::json& j, const PosTagMap& tags = {});
};

std::vector<WsdGoldItem> read_gold_items(const std::string& path, const PosTagMap& tags = {});

// One scored item. predicted is empty when the engine failed on the item.
struct WsdPrediction {
  std::string lemma;
  Pos pos = Pos::noun;
  std::string gold;
  std::vector<std::string> alternative_gold;
  std::optional<std::string> predicted;
};

struct F1Summary {
  double micro_f1 = 0;
  double macro_f1 = 0;
  std::size_t items = 0;
};

struct WsdMetrics {
  double micro_f1 = 0;
  double macro_f1 = 0;
  double accuracy = 0;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t failures = 0;
  std::map<Pos, F1Summary> per_pos;
  // Keyed "lemma/pos".
  std::map<std::string, double> per_lemma_f1;

  nlohmann::json to_json() const;
};

// Micro-F1 pools every item; a failed item counts as one false positive and
// one false negative. Macro-F1 is the unweighted mean over target (lemma, pos)
// of the per-target F1, itself the mean over that target's sense labels.
WsdMetrics score_wsd(std::span<const WsdPrediction> predictions);

// Per-target F1: mean over sense labels seen as gold or prediction.
double target_f1(std::span<const WsdPrediction> items);

WsdMetrics eval_wsd(std::span<const WsdGoldItem> gold, const KnowledgeBase& kb, Scorer& scorer,
                    const WsdConfig& config = {}, std::vector<WsdResult>* results = nullptr);

// ---- similarity classification ---------------------------------------------

struct SplitIndices {
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

// Deterministic seeded permutation; the first round(ratio * n) items (at least
// one, leaving at least one) form the dev split. Both lists are ascending.
SplitIndices seeded_split(std::size_t n, double dev_ratio, std::uint64_t seed);

struct ThresholdChoice {
  double threshold = 0;
  double accuracy = 0;
};

// Best "match iff distance <= threshold" rule over midpoints of consecutive
// distinct finite distances; ties keep the smallest threshold.
ThresholdChoice select_threshold(std::span<const double> distances, std::span<const int> labels);

double threshold_accuracy(std::span<const double> distances, std::span<const int> labels, double threshold);

class DegenerateSplitError : public Error {
 public:
  using Error::Error;
};

struct SimilarityMetrics {
  double accuracy = 0;
  double threshold = 0;
  double dev_accuracy = 0;
  std::size_t dev_size = 0;
  std::size_t test_size = 0;
  std::size_t failed_pairs = 0;
  std::uint64_t seed = 0;
  double split_ratio = 0;

  nlohmann::json to_json() const;
};

// Threshold chosen on the dev split only, accuracy measured on the test split only.
SimilarityMetrics evaluate_distances(std::span<const double> distances, std::span<const int> labels,
                                     double dev_ratio, std::uint64_t seed);

// WMD per pair (pairs whose sides have no vectors get +inf and never match).
std::vector<double> pair_distances(std::span<const LabeledPair> pairs, const EmbeddingStore& store,
                                   std::size_t* failed = nullptr);

SimilarityMetrics eval_similarity(std::span<const LabeledPair> pairs, const EmbeddingStore& store,
                                  double dev_ratio = 0.2, std::uint64_t seed = 0);

// ---- baseline vs sense pipeline ----------------------------------------------

struct SensePipeline {
  const KnowledgeBase& kb;
  const PolysemyDictionary& dict;
  Scorer& scorer;
  WsdConfig wsd{};
  SenseVectorOptions embed{};
};

struct AnnotatedPairs {
  std::vector<LabeledPair> pairs;
  std::size_t annotated_tokens = 0;
  std::size_t failed_tokens = 0;
};

// Annotates both sides of every pair that carries POS tags.
AnnotatedPairs annotate_pairs(std::span<const LabeledPair> pairs, const KnowledgeBase& kb,
                              const PolysemyDictionary& dict, Scorer& scorer, const WsdConfig& config = {});

struct PipelineComparison {
  SimilarityMetrics baseline;
  SimilarityMetrics swsds;
  double delta = 0;
  std::size_t annotated_tokens = 0;
  std::size_t sense_vectors_added = 0;

  nlohmann::json to_json() const;
};

// Baseline: plain tokens against base_store. Sense arm: tokens annotated with
// sense keys, sense vectors added to a copy of base_store. Same split seed.
PipelineComparison compare_pipelines(std::span<const LabeledPair> pairs, const EmbeddingStore& base_store,
                                     const SensePipeline& pipeline, double dev_ratio, std::uint64_t seed);

}  // namespace swsds
