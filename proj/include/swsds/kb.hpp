#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "swsds/pos.hpp"

namespace swsds {

struct Sememe {
  std::string id;
  std::string label;
};

// One node of a sememe annotation tree. The root carries no relation.
struct AnnotationNode {
  std::string sememe;
  std::string relation;
  std::vector<AnnotationNode> children;
};

// Sememe tree plus its canonical serialization. Two annotations are equal iff
// their canonical keys are byte-equal; child order in the input is irrelevant.
class SememeAnnotation {
 public:
  SememeAnnotation() = default;
  explicit SememeAnnotation(AnnotationNode root);

  const AnnotationNode& tree() const noexcept { return root_; }
  const std::string& canonical_key() const noexcept { return key_; }
  bool empty() const noexcept { return root_.sememe.empty(); }

  // Number of sememe nodes in the tree.
  std::size_t size() const;
  std::vector<std::string> sememes() const;

  static SememeAnnotation from_json(const nlohmann::json& node);
  nlohmann::json to_json() const;

  friend bool operator==(const SememeAnnotation& a, const SememeAnnotation& b) {
    return a.key_ == b.key_;
  }

 private:
  AnnotationNode root_;
  std::string key_;
};

struct Sense {
  std::string sense_id;
  std::string lemma;
  Pos pos = Pos::noun;
  std::string gloss;
  SememeAnnotation annotation;
};

// Orders sense ids numerically when both are decimal strings, else bytewise.
bool sense_id_less(std::string_view a, std::string_view b);

inline constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();

// Immutable after construction; safe for concurrent readers.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Throws DuplicateKeyError on repeated sense ids, InvalidArgument on empty annotations.
  static KnowledgeBase from_senses(std::vector<Sense> senses);

  std::span<const Sense> senses() const noexcept { return senses_; }
  std::size_t size() const noexcept { return senses_.size(); }
  bool empty() const noexcept { return senses_.empty(); }

  const Sense* find(std::string_view sense_id) const;

  // Senses of lemma (restricted to pos when given), ordered by sense id.
  std::vector<const Sense*> senses_of(std::string_view lemma,
                                      std::optional<Pos> pos = std::nullopt) const;

  // Lemmas of other senses with the same canonical annotation, in file order,
  // without the sense's own lemma and without repeats, at most k of them.
  std::vector<std::string> synonyms_of(const Sense& sense, std::size_t k = unbounded) const;

  // Senses sharing one canonical key, in file order.
  std::vector<const Sense*> annotation_class(std::string_view canonical_key) const;

  // Distinct sememes in order of first appearance.
  std::vector<Sememe> sememes() const;

  std::vector<std::string> lemmas() const;
  std::size_t annotation_class_count() const noexcept { return by_annotation_.size(); }

 private:
  std::vector<Sense> senses_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_lemma_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_annotation_;
};

// KB JSONL: one sense object per line. Blank lines are ignored.
KnowledgeBase load_kb(const std::string& path);
KnowledgeBase parse_kb(std::istream& in, const std::string& source = "<stream>");
void save_kb(const KnowledgeBase& kb, const std::string& path);
void write_kb(const KnowledgeBase& kb, std::ostream& out);

nlohmann::json sense_to_json(const Sense& sense);

class PolysemyDictionary {
 public:
  using Key = std::pair<std::string, Pos>;

  void set(std::string lemma, Pos pos, std::size_t count);

  bool contains(std::string_view lemma, Pos pos) const;
  std::size_t count(std::string_view lemma, Pos pos) const;
  const std::map<Key, std::size_t>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const PolysemyDictionary&, const PolysemyDictionary&) = default;

 private:
  std::map<Key, std::size_t> entries_;
};

// (lemma, pos) pairs with two or more senses.
PolysemyDictionary build_polysemy_dict(const KnowledgeBase& kb);

// TSV rows lemma<TAB>pos<TAB>count, no header, sorted by (lemma, pos).
void write_polysemy_tsv(const PolysemyDictionary& dict, std::ostream& out);
PolysemyDictionary read_polysemy_tsv(const std::string& path);

}  // namespace swsds
