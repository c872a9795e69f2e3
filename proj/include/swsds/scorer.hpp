#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "swsds/errors.hpp"

namespace swsds {

inline constexpr std::string_view kMaskToken = "<mask>";

// A context with exactly one mask token at mask_index.
struct MaskedQuery {
  std::vector<std::string> tokens;
  std::size_t mask_index = 0;
  std::string mask = std::string(kMaskToken);

  // Throws InvalidArgument unless tokens[mask_index] is the only mask token.
  void validate() const;

  // Byte-stable serialization used for hashing and cache keys.
  std::string canonical() const;
};

struct CandidateScores {
  std::map<std::string, double> scores;

  double at(const std::string& candidate) const { return scores.at(candidate); }
  std::size_t size() const noexcept { return scores.size(); }
  friend bool operator==(const CandidateScores&, const CandidateScores&) = default;
};

class ScorerError : public Error {
 public:
  enum class Kind { transport, protocol };

  ScorerError(Kind kind, bool retryable, const std::string& what)
      : Error(what), kind_(kind), retryable_(retryable) {}

  Kind kind() const noexcept { return kind_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  Kind kind_;
  bool retryable_;
};

// Scores whole-lemma candidates at the masked position with probabilities in [0,1].
// Implementations are safe to call from several threads.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual CandidateScores score(const MaskedQuery& query, std::span<const std::string> candidates) = 0;

  // When true, in_vocabulary() is meaningful and substitutes are filtered by it.
  virtual bool has_vocabulary() const { return false; }
  virtual bool in_vocabulary(std::string_view) const { return true; }
};

// Checks the scoring contract around scorer.score(): non-empty deduplicated
// candidates in, one finite score in [0,1] per candidate out.
CandidateScores score_candidates(Scorer& scorer, const MaskedQuery& query,
                                 std::span<const std::string> candidates);

struct StubTable {
  std::map<std::string, double> unigram;
  // cue word -> candidate -> score; applies when the cue occurs in the context.
  std::map<std::string, std::map<std::string, double>> cues;
  std::optional<std::set<std::string>> vocabulary;

  // Either {"unigram": {...}, "cues": {...}, "vocabulary": [...]} or a flat
  // {candidate: score} object.
  static StubTable from_json(const nlohmann::json& j);
  static StubTable load(const std::string& path);
};

// Deterministic value in (0,1) from a 64-bit hash of (seed, query, candidate).
double stub_hash_score(std::uint64_t seed, const MaskedQuery& query, std::string_view candidate);

CandidateScores stub_score(const StubTable& table, std::uint64_t seed, const MaskedQuery& query,
                           std::span<const std::string> candidates);

class StubScorer final : public Scorer {
 public:
  explicit StubScorer(StubTable table = {}, std::uint64_t seed = 0)
      : table_(std::move(table)), seed_(seed) {}

  CandidateScores score(const MaskedQuery& query, std::span<const std::string> candidates) override {
    return stub_score(table_, seed_, query, candidates);
  }
  bool has_vocabulary() const override { return table_.vocabulary.has_value(); }
  bool in_vocabulary(std::string_view lemma) const override {
    return !table_.vocabulary || table_.vocabulary->count(std::string(lemma)) > 0;
  }

  const StubTable& table() const noexcept { return table_; }

 private:
  StubTable table_;
  std::uint64_t seed_;
};

// Client for the POST /v1/score JSON protocol.
class RemoteScorer final : public Scorer {
 public:
  // endpoint: "http://host:port" with an optional path prefix.
  explicit RemoteScorer(std::string endpoint,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(30000));

  CandidateScores score(const MaskedQuery& query, std::span<const std::string> candidates) override;

  std::string model() const;
  std::size_t requests() const;

 private:
  std::string origin_;
  std::string prefix_;
  std::chrono::milliseconds timeout_;
  mutable std::mutex mutex_;
  std::string model_;
  std::size_t requests_ = 0;
};

// Persistent JSONL score cache keyed by (SHA-256 of the canonical query, candidate).
class CachedScorer final : public Scorer {
 public:
  CachedScorer(std::shared_ptr<Scorer> inner, std::string cache_path);

  CandidateScores score(const MaskedQuery& query, std::span<const std::string> candidates) override;
  bool has_vocabulary() const override { return inner_->has_vocabulary(); }
  bool in_vocabulary(std::string_view lemma) const override { return inner_->in_vocabulary(lemma); }

  std::size_t hits() const;
  std::size_t misses() const;
  std::size_t entries() const;
  std::size_t skipped_lines() const noexcept { return skipped_lines_; }

 private:
  void load();
  void append(const std::vector<std::pair<std::string, double>>& rows);

  std::shared_ptr<Scorer> inner_;
  std::string path_;
  mutable std::shared_mutex table_mutex_;
  std::unordered_map<std::string, double> table_;
  std::mutex write_mutex_;
  std::size_t skipped_lines_ = 0;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

std::string sha256_hex(std::string_view data);

struct ScorerConfig {
  std::optional<std::string> endpoint;
  std::optional<std::string> cache_path;
  std::chrono::milliseconds timeout{30000};
  std::uint64_t stub_seed = 0;
  std::optional<std::string> stub_table_path;
};

// Stub when no endpoint is configured, remote otherwise; cached when a cache path is set.
std::shared_ptr<Scorer> make_scorer(const ScorerConfig& config);

}  // namespace swsds
