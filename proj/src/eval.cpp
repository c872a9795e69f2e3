#include "swsds/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "swsds/log.hpp"

namespace swsds {
namespace {

std::string target_key(const WsdPrediction& p) { return p.lemma + "/" + to_string(p.pos); }

bool is_correct(const WsdPrediction& p) {
  if (!p.predicted) return false;
  if (*p.predicted == p.gold) return true;
  return std::find(p.alternative_gold.begin(), p.alternative_gold.end(), *p.predicted) != p.alternative_gold.end();
}

// The gold label an item is scored against: the prediction when it is an
// acceptable gold sense, else the primary gold sense.
const std::string& effective_gold(const WsdPrediction& p) { return is_correct(p) ? *p.predicted : p.gold; }

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

F1Summary summarize(const std::vector<WsdPrediction>& items) {
  F1Summary s;
  s.items = items.size();
  std::size_t correct = 0;
  std::map<std::string, std::vector<WsdPrediction>> by_target;
  for (const auto& p : items) {
    correct += is_correct(p);
    by_target[target_key(p)].push_back(p);
  }
  const std::size_t wrong = items.size() - correct;
  s.micro_f1 = f1(correct, wrong, wrong);
  double sum = 0;
  for (const auto& [_, group] : by_target) sum += target_f1(group);
  s.macro_f1 = by_target.empty() ? 0.0 : sum / static_cast<double>(by_target.size());
  return s;
}

}  // namespace

WsdGoldItem WsdGoldItem::from_json(const nlohmann::json& j, const PosTagMap& tags) {
  WsdGoldItem item;
  item.instance = WsdInstance::from_json(j, tags);
  try {
    item.gold_sense_id = j.at("gold_sense_id").get<std::string>();
    if (auto alt = j.find("alternative_gold"); alt != j.end())
      item.alternative_gold = alt->get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(e.what());
  }
  if (item.gold_sense_id.empty()) throw InvalidArgument("gold_sense_id is empty");
  return item;
}

std::vector<WsdGoldItem> read_gold_items(const std::string& path, const PosTagMap& tags) {
  std::vector<WsdGoldItem> out;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(WsdGoldItem::from_json(j, tags)); });
  return out;
}

double target_f1(std::span<const WsdPrediction> items) {
  std::set<std::string> labels;
  for (const auto& p : items) {
    labels.insert(effective_gold(p));
    if (p.predicted) labels.insert(*p.predicted);
  }
  if (labels.empty()) return 0.0;
  double sum = 0;
  for (const auto& label : labels) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& p : items) {
      const bool gold_is = effective_gold(p) == label;
      const bool pred_is = p.predicted && *p.predicted == label;
      tp += gold_is && pred_is;
      fp += !gold_is && pred_is;
      fn += gold_is && !pred_is;
    }
    sum += f1(tp, fp, fn);
  }
  return sum / static_cast<double>(labels.size());
}

WsdMetrics score_wsd(std::span<const WsdPrediction> predictions) {
  if (predictions.empty()) throw InvalidArgument("no WSD items to score");
  WsdMetrics m;
  m.total = predictions.size();
  std::vector<WsdPrediction> all(predictions.begin(), predictions.end());
  std::map<Pos, std::vector<WsdPrediction>> by_pos;
  std::map<std::string, std::vector<WsdPrediction>> by_target;
  for (const auto& p : all) {
    m.correct += is_correct(p);
    m.failures += !p.predicted;
    by_pos[p.pos].push_back(p);
    by_target[target_key(p)].push_back(p);
  }
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.total);
  auto overall = summarize(all);
  m.micro_f1 = overall.micro_f1;
  m.macro_f1 = overall.macro_f1;
  for (const auto& [pos, items] : by_pos) m.per_pos[pos] = summarize(items);
  for (const auto& [key, items] : by_target) m.per_lemma_f1[key] = target_f1(items);
  return m;
}

nlohmann::json WsdMetrics::to_json() const {
  nlohmann::json pos = nlohmann::json::object();
  for (const auto& [p, s] : per_pos)
    pos[to_string(p)] = {{"micro_f1", s.micro_f1}, {"macro_f1", s.macro_f1}, {"items", s.items}};
  return {{"micro_f1", micro_f1}, {"macro_f1", macro_f1}, {"accuracy", accuracy}, {"total", total},
          {"correct", correct},   {"failures", failures}, {"per_pos", pos},        {"per_lemma_f1", per_lemma_f1}};
}

WsdMetrics eval_wsd(std::span<const WsdGoldItem> gold, const KnowledgeBase& kb, Scorer& scorer,
                    const WsdConfig& config, std::vector<WsdResult>* results) {
  std::vector<WsdPrediction> predictions;
  predictions.reserve(gold.size());
  for (const auto& item : gold) {
    WsdPrediction p{item.instance.target_word, item.instance.target_pos, item.gold_sense_id, item.alternative_gold,
                    std::nullopt};
    try {
      auto result = disambiguate(item.instance, kb, scorer, config);
      p.predicted = result.chosen;
      if (results) results->push_back(std::move(result));
    } catch (const Error& e) {
      log::warn("wsd.item_failed", {{"id", item.instance.id}, {"target", item.instance.target_word}, {"error", e.what()}});
      if (results) results->push_back(WsdResult{});
    }
    predictions.push_back(std::move(p));
  }
  return score_wsd(predictions);
}

SplitIndices seeded_split(std::size_t n, double dev_ratio, std::uint64_t seed) {
  if (n < 2) throw DegenerateSplitError("need at least two items to split");
  if (!(dev_ratio > 0.0 && dev_ratio < 1.0)) throw InvalidArgument("split ratio must be in (0,1)");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
  auto n_dev = static_cast<std::size_t>(std::llround(dev_ratio * static_cast<double>(n)));
  n_dev = std::clamp<std::size_t>(n_dev, 1, n - 1);
  SplitIndices split;
  split.dev.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_dev));
  split.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_dev), perm.end());
  std::sort(split.dev.begin(), split.dev.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

double threshold_accuracy(std::span<const double> distances, std::span<const int> labels, double threshold) {
  if (distances.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < distances.size(); ++i) correct += ((distances[i] <= threshold) == (labels[i] == 1));
  return static_cast<double>(correct) / static_cast<double>(distances.size());
}

ThresholdChoice select_threshold(std::span<const double> distances, std::span<const int> labels) {
  if (distances.size() != labels.size()) throw InvalidArgument("distances and labels differ in length");
  std::vector<double> sorted;
  for (double d : distances) {
    if (std::isfinite(d)) sorted.push_back(d);
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<double> candidates;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  if (candidates.empty()) candidates.push_back(sorted.empty() ? 0.0 : sorted.front());

  ThresholdChoice best{candidates.front(), -1.0};
  for (double t : candidates) {
    const double acc = threshold_accuracy(distances, labels, t);
    if (acc > best.accuracy) best = {t, acc};
  }
  return best;
}

SimilarityMetrics evaluate_distances(std::span<const double> distances, std::span<const int> labels,
                                     double dev_ratio, std::uint64_t seed) {
  if (distances.size() != labels.size()) throw InvalidArgument("distances and labels differ in length");
  auto split = seeded_split(distances.size(), dev_ratio, seed);
  auto gather = [&](const std::vector<std::size_t>& idx, std::vector<double>& d, std::vector<int>& l) {
    for (auto i : idx) {
      d.push_back(distances[i]);
      l.push_back(labels[i]);
    }
  };
  std::vector<double> dev_d, test_d;
  std::vector<int> dev_l, test_l;
  gather(split.dev, dev_d, dev_l);
  gather(split.test, test_d, test_l);
  const auto positives = std::count(dev_l.begin(), dev_l.end(), 1);
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(dev_l.size()))
    throw DegenerateSplitError("dev split contains a single class");

  auto choice = select_threshold(dev_d, dev_l);
  SimilarityMetrics m;
  m.threshold = choice.threshold;
  m.dev_accuracy = choice.accuracy;
  m.accuracy = threshold_accuracy(test_d, test_l, choice.threshold);
  m.dev_size = dev_d.size();
  m.test_size = test_d.size();
  m.seed = seed;
  m.split_ratio = dev_ratio;
  return m;
}

std::vector<double> pair_distances(std::span<const LabeledPair> pairs, const EmbeddingStore& store,
                                   std::size_t* failed) {
  std::vector<double> out;
  out.reserve(pairs.size());
  std::size_t failures = 0;
  for (const auto& p : pairs) {
    try {
      out.push_back(wmd_distance<double>(p.a, p.b, store));
    } catch (const EmptyDocumentError&) {
      out.push_back(std::numeric_limits<double>::infinity());
      ++failures;
    }
  }
  if (failed) *failed = failures;
  return out;
}

SimilarityMetrics eval_similarity(std::span<const LabeledPair> pairs, const EmbeddingStore& store,
                                  double dev_ratio, std::uint64_t seed) {
  std::vector<int> labels;
  for (const auto& p : pairs) {
    if (!p.label) throw InvalidArgument("pair \"" + p.id + "\" has no label");
    labels.push_back(*p.label);
  }
  std::size_t failed = 0;
  auto distances = pair_distances(pairs, store, &failed);
  auto m = evaluate_distances(distances, labels, dev_ratio, seed);
  m.failed_pairs = failed;
  return m;
}

nlohmann::json SimilarityMetrics::to_json() const {
  return {{"accuracy", accuracy},         {"threshold", threshold},     {"dev_accuracy", dev_accuracy},
          {"split_sizes", {dev_size, test_size}}, {"failed_pairs", failed_pairs}, {"seed", seed},
          {"split_ratio", split_ratio}};
}

AnnotatedPairs annotate_pairs(std::span<const LabeledPair> pairs, const KnowledgeBase& kb,
                              const PolysemyDictionary& dict, Scorer& scorer, const WsdConfig& config) {
  AnnotatedPairs out;
  out.pairs.assign(pairs.begin(), pairs.end());
  std::vector<TaggedSentence> sentences;
  std::vector<std::vector<std::string>*> targets;
  for (auto& p : out.pairs) {
    if (!p.a_pos.empty()) {
      sentences.push_back({p.a, p.a_pos});
      targets.push_back(&p.a);
    }
    if (!p.b_pos.empty()) {
      sentences.push_back({p.b, p.b_pos});
      targets.push_back(&p.b);
    }
  }
  auto annotated = annotate_corpus(sentences, kb, dict, scorer, config);
  for (std::size_t i = 0; i < annotated.size(); ++i) {
    *targets[i] = std::move(annotated[i].tokens);
    out.annotated_tokens += annotated[i].results.size();
    out.failed_tokens += annotated[i].failures.size();
  }
  return out;
}

nlohmann::json PipelineComparison::to_json() const {
  return {{"baseline", baseline.to_json()},
          {"swsds", swsds.to_json()},
          {"delta", delta},
          {"annotated_tokens", annotated_tokens},
          {"sense_vectors_added", sense_vectors_added}};
}

PipelineComparison compare_pipelines(std::span<const LabeledPair> pairs, const EmbeddingStore& base_store,
                                     const SensePipeline& pipeline, double dev_ratio, std::uint64_t seed) {
  PipelineComparison out;
  out.baseline = eval_similarity(pairs, base_store, dev_ratio, seed);

  auto annotated = annotate_pairs(pairs, pipeline.kb, pipeline.dict, pipeline.scorer, pipeline.wsd);
  out.annotated_tokens = annotated.annotated_tokens;
  std::vector<std::vector<std::string>> corpus;
  for (const auto& p : annotated.pairs) {
    corpus.push_back(p.a);
    corpus.push_back(p.b);
  }
  EmbeddingStore sense_store = base_store;
  auto embedded = embed_senses<double>(corpus, pipeline.kb, sense_store, pipeline.embed);
  out.sense_vectors_added = embedded.inserted;

  out.swsds = eval_similarity(annotated.pairs, sense_store, dev_ratio, seed);
  out.delta = out.swsds.accuracy - out.baseline.accuracy;
  return out;
}

}  // namespace swsds
