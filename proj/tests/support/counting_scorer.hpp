#pragma once

#include <atomic>
#include <memory>

#include "swsds/scorer.hpp"

namespace swsds::testing {

// Forwards to an inner scorer and counts calls and scored candidates.
class CountingScorer final : public Scorer {
 public:
  explicit CountingScorer(std::shared_ptr<Scorer> inner) : inner_(std::move(inner)) {}

  CandidateScores score(const MaskedQuery& query, std::span<const std::string> candidates) override {
    ++calls_;
    candidates_ += candidates.size();
    return inner_->score(query, candidates);
  }
  bool has_vocabulary() const override { return inner_->has_vocabulary(); }
  bool in_vocabulary(std::string_view lemma) const override { return inner_->in_vocabulary(lemma); }

  std::size_t calls() const { return calls_; }
  std::size_t candidates() const { return candidates_; }

 private:
  std::shared_ptr<Scorer> inner_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> candidates_{0};
};

}  // namespace swsds::testing
