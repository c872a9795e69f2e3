#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsds/pos.hpp"
#include "swsds/wsd.hpp"

namespace swsds {

// Calls fn(record, line_no) for each non-blank line. Errors thrown by fn that
// derive from InvalidArgument, and JSON syntax errors, become ParseError with
// the line number.
void for_each_jsonl(const std::string& path, const std::function<void(const nlohmann::json&, std::size_t)>& fn);

// Sentence file lines: {"tokens": [...], "pos": [...]} ("pos_tags" also accepted).
TaggedSentence tagged_sentence_from_json(const nlohmann::json& j, const PosTagMap& tags = {});
std::vector<TaggedSentence> read_tagged_sentences(const std::string& path, const PosTagMap& tags = {});

std::vector<WsdInstance> read_wsd_instances(const std::string& path, const PosTagMap& tags = {});

// Space-joined token lines; "lemma=sense_id" tokens survive as-is.
std::vector<std::vector<std::string>> read_token_lines(const std::string& path);
std::vector<std::string> split_tokens(const std::string& line);

// Pair file record: {"id", "a": [...], "b": [...], "label": 0|1} with optional
// "a_pos"/"b_pos" tag lists used when annotating senses.
struct LabeledPair {
  std::string id;
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::optional<int> label;
  std::vector<Pos> a_pos;
  std::vector<Pos> b_pos;

  static LabeledPair from_json(const nlohmann::json& j, const PosTagMap& tags = {});
  nlohmann::json to_json() const;
};

std::vector<LabeledPair> read_pairs(const std::string& path, const PosTagMap& tags = {});
void write_pairs(const std::vector<LabeledPair>& pairs, const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace swsds
