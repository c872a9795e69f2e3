#include "swsds/io.hpp"

#include <fstream>
#include <sstream>

#include "swsds/errors.hpp"

namespace swsds {
namespace {

std::vector<Pos> tags_from_json(const nlohmann::json& j, const PosTagMap& tags) {
  std::vector<Pos> out;
  for (const auto& t : j) {
    auto tag = t.get<std::string>();
    auto pos = tags.map(tag);
    if (!pos) throw InvalidArgument("unknown POS tag \"" + tag + "\"");
    out.push_back(*pos);
  }
  return out;
}

nlohmann::json tags_to_json(const std::vector<Pos>& tags) {
  nlohmann::json out = nlohmann::json::array();
  for (auto p : tags) out.push_back(to_string(p));
  return out;
}

}  // namespace

void for_each_jsonl(const std::string& path, const std::function<void(const nlohmann::json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, line_no, e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
}

TaggedSentence tagged_sentence_from_json(const nlohmann::json& j, const PosTagMap& tags) {
  TaggedSentence s;
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  const auto& pos = j.contains("pos") ? j.at("pos") : j.at("pos_tags");
  s.pos_tags = tags_from_json(pos, tags);
  if (s.tokens.size() != s.pos_tags.size()) throw InvalidArgument("tokens and pos differ in length");
  return s;
}

std::vector<TaggedSentence> read_tagged_sentences(const std::string& path, const PosTagMap& tags) {
  std::vector<TaggedSentence> out;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(tagged_sentence_from_json(j, tags)); });
  return out;
}

std::vector<WsdInstance> read_wsd_instances(const std::string& path, const PosTagMap& tags) {
  std::vector<WsdInstance> out;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(WsdInstance::from_json(j, tags)); });
  return out;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(split_tokens(line));
  return out;
}

LabeledPair LabeledPair::from_json(const nlohmann::json& j, const PosTagMap& tags) {
  LabeledPair p;
  try {
    if (auto id = j.find("id"); id != j.end()) p.id = id->is_string() ? id->get<std::string>() : id->dump();
    p.a = j.at("a").get<std::vector<std::string>>();
    p.b = j.at("b").get<std::vector<std::string>>();
    if (auto label = j.find("label"); label != j.end() && !label->is_null()) {
      int v = label->get<int>();
      if (v != 0 && v != 1) throw InvalidArgument("label must be 0 or 1");
      p.label = v;
    }
    if (auto pos = j.find("a_pos"); pos != j.end()) p.a_pos = tags_from_json(*pos, tags);
    if (auto pos = j.find("b_pos"); pos != j.end()) p.b_pos = tags_from_json(*pos, tags);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(e.what());
  }
  if (!p.a_pos.empty() && p.a_pos.size() != p.a.size()) throw InvalidArgument("a_pos and a differ in length");
  if (!p.b_pos.empty() && p.b_pos.size() != p.b.size()) throw InvalidArgument("b_pos and b differ in length");
  return p;
}

nlohmann::json LabeledPair::to_json() const {
  nlohmann::json j = {{"id", id}, {"a", a}, {"b", b}};
  if (label) j["label"] = *label;
  if (!a_pos.empty()) j["a_pos"] = tags_to_json(a_pos);
  if (!b_pos.empty()) j["b_pos"] = tags_to_json(b_pos);
  return j;
}

std::vector<LabeledPair> read_pairs(const std::string& path, const PosTagMap& tags) {
  std::vector<LabeledPair> out;
  for_each_jsonl(path, [&](const nlohmann::json& j, std::size_t) { out.push_back(LabeledPair::from_json(j, tags)); });
  return out;
}

void write_pairs(const std::vector<LabeledPair>& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& p : pairs) out << p.to_json().dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace swsds
