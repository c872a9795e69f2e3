#include "swsds/kb.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "swsds/errors.hpp"

namespace swsds {
namespace {

// Canonical form of a subtree as a JSON array [relation, sememe, [children...]],
// children sorted by (relation, sememe, canonical subtree).
nlohmann::json canonical_node(const AnnotationNode& node) {
  std::vector<nlohmann::json> children;
  children.reserve(node.children.size());
  for (const auto& child : node.children) children.push_back(canonical_node(child));
  std::sort(children.begin(), children.end(), [](const nlohmann::json& a, const nlohmann::json& b) {
    const auto& ra = a[0].get_ref<const std::string&>();
    const auto& rb = b[0].get_ref<const std::string&>();
    if (ra != rb) return ra < rb;
    const auto& sa = a[1].get_ref<const std::string&>();
    const auto& sb = b[1].get_ref<const std::string&>();
    if (sa != sb) return sa < sb;
    return a[2].dump() < b[2].dump();
  });
  return nlohmann::json::array({node.relation, node.sememe, std::move(children)});
}

std::size_t count_nodes(const AnnotationNode& node) {
  std::size_t n = node.sememe.empty() ? 0 : 1;
  for (const auto& child : node.children) n += count_nodes(child);
  return n;
}

void collect_sememes(const AnnotationNode& node, std::vector<std::string>& out) {
  if (!node.sememe.empty()) out.push_back(node.sememe);
  for (const auto& child : node.children) collect_sememes(child, out);
}

AnnotationNode node_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("annotation node must be an object");
  AnnotationNode node;
  auto sememe = j.find("sememe");
  if (sememe == j.end() || !sememe->is_string() || sememe->get_ref<const std::string&>().empty())
    throw InvalidArgument("annotation node needs a non-empty \"sememe\" string");
  node.sememe = sememe->get<std::string>();
  if (auto rel = j.find("relation"); rel != j.end() && !rel->is_null()) {
    if (!rel->is_string()) throw InvalidArgument("\"relation\" must be a string");
    node.relation = rel->get<std::string>();
  }
  if (auto kids = j.find("children"); kids != j.end() && !kids->is_null()) {
    if (!kids->is_array()) throw InvalidArgument("\"children\" must be an array");
    for (const auto& child : *kids) node.children.push_back(node_from_json(child));
  }
  return node;
}

nlohmann::json node_to_json(const AnnotationNode& node) {
  nlohmann::json j = {{"sememe", node.sememe}};
  if (!node.relation.empty()) j["relation"] = node.relation;
  j["children"] = nlohmann::json::array();
  for (const auto& child : node.children) j["children"].push_back(node_to_json(child));
  return j;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view strip_zeros(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return s;
}

Sense sense_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("record must be a JSON object");
  auto need_string = [&](const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
      throw InvalidArgument(std::string("missing or empty string field \"") + field + "\"");
    return it->get<std::string>();
  };
  Sense sense;
  sense.sense_id = need_string("sense_id");
  sense.lemma = need_string("lemma");
  auto tag = need_string("pos");
  auto pos = parse_pos(tag);
  if (!pos) throw InvalidArgument("unknown POS tag \"" + tag + "\"");
  sense.pos = *pos;
  if (auto gloss = j.find("gloss"); gloss != j.end() && gloss->is_string()) sense.gloss = gloss->get<std::string>();
  auto ann = j.find("annotation");
  if (ann == j.end()) throw InvalidArgument("missing \"annotation\"");
  sense.annotation = SememeAnnotation::from_json(*ann);
  return sense;
}

}  // namespace

SememeAnnotation::SememeAnnotation(AnnotationNode root)
    : root_(std::move(root)), key_(canonical_node(root_).dump()) {}

std::size_t SememeAnnotation::size() const { return count_nodes(root_); }

std::vector<std::string> SememeAnnotation::sememes() const {
  std::vector<std::string> out;
  collect_sememes(root_, out);
  return out;
}

SememeAnnotation SememeAnnotation::from_json(const nlohmann::json& node) {
  return SememeAnnotation(node_from_json(node));
}

nlohmann::json SememeAnnotation::to_json() const { return node_to_json(root_); }

bool sense_id_less(std::string_view a, std::string_view b) {
  if (all_digits(a) && all_digits(b)) {
    auto na = strip_zeros(a), nb = strip_zeros(b);
    if (na.size() != nb.size()) return na.size() < nb.size();
    if (na != nb) return na < nb;
  }
  return a < b;
}

KnowledgeBase KnowledgeBase::from_senses(std::vector<Sense> senses) {
  KnowledgeBase kb;
  kb.senses_ = std::move(senses);
  for (std::size_t i = 0; i < kb.senses_.size(); ++i) {
    const auto& s = kb.senses_[i];
    if (s.annotation.empty()) throw InvalidArgument("sense " + s.sense_id + " has an empty annotation");
    if (!kb.by_id_.emplace(s.sense_id, i).second) throw DuplicateKeyError(s.sense_id, "sense_id");
    kb.by_lemma_[s.lemma].push_back(i);
    kb.by_annotation_[s.annotation.canonical_key()].push_back(i);
  }
  return kb;
}

const Sense* KnowledgeBase::find(std::string_view sense_id) const {
  auto it = by_id_.find(std::string(sense_id));
  return it == by_id_.end() ? nullptr : &senses_[it->second];
}

std::vector<const Sense*> KnowledgeBase::senses_of(std::string_view lemma, std::optional<Pos> pos) const {
  std::vector<const Sense*> out;
  auto it = by_lemma_.find(std::string(lemma));
  if (it == by_lemma_.end()) return out;
  for (auto idx : it->second) {
    if (!pos || senses_[idx].pos == *pos) out.push_back(&senses_[idx]);
  }
  std::sort(out.begin(), out.end(),
            [](const Sense* a, const Sense* b) { return sense_id_less(a->sense_id, b->sense_id); });
  return out;
}

std::vector<std::string> KnowledgeBase::synonyms_of(const Sense& sense, std::size_t k) const {
  std::vector<std::string> out;
  auto it = by_annotation_.find(sense.annotation.canonical_key());
  if (it == by_annotation_.end() || k == 0) return out;
  std::unordered_set<std::string_view> seen{sense.lemma};
  for (auto idx : it->second) {
    const auto& lemma = senses_[idx].lemma;
    if (!seen.insert(lemma).second) continue;
    out.push_back(lemma);
    if (out.size() == k) break;
  }
  return out;
}

std::vector<const Sense*> KnowledgeBase::annotation_class(std::string_view canonical_key) const {
  std::vector<const Sense*> out;
  if (auto it = by_annotation_.find(std::string(canonical_key)); it != by_annotation_.end()) {
    for (auto idx : it->second) out.push_back(&senses_[idx]);
  }
  return out;
}

std::vector<Sememe> KnowledgeBase::sememes() const {
  std::vector<Sememe> out;
  std::unordered_set<std::string> seen;
  for (const auto& sense : senses_) {
    for (auto& id : sense.annotation.sememes()) {
      if (seen.insert(id).second) out.push_back({id, id});
    }
  }
  return out;
}

std::vector<std::string> KnowledgeBase::lemmas() const {
  std::vector<std::string> out;
  out.reserve(by_lemma_.size());
  for (const auto& [lemma, _] : by_lemma_) out.push_back(lemma);
  std::sort(out.begin(), out.end());
  return out;
}

KnowledgeBase parse_kb(std::istream& in, const std::string& source) {
  std::vector<Sense> senses;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Sense sense;
    try {
      sense = sense_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line_no, e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!ids.insert(sense.sense_id).second)
      throw DuplicateKeyError(sense.sense_id, source + ":" + std::to_string(line_no));
    senses.push_back(std::move(sense));
  }
  return KnowledgeBase::from_senses(std::move(senses));
}

KnowledgeBase load_kb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open knowledge base " + path);
  return parse_kb(in, path);
}

nlohmann::json sense_to_json(const Sense& sense) {
  nlohmann::json j = {{"sense_id", sense.sense_id}, {"lemma", sense.lemma}, {"pos", to_string(sense.pos)}};
  if (!sense.gloss.empty()) j["gloss"] = sense.gloss;
  j["annotation"] = sense.annotation.to_json();
  return j;
}

void write_kb(const KnowledgeBase& kb, std::ostream& out) {
  for (const auto& sense : kb.senses()) out << sense_to_json(sense).dump() << '\n';
}

void save_kb(const KnowledgeBase& kb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write knowledge base " + path);
  write_kb(kb, out);
  if (!out) throw IoError("write failed: " + path);
}

void PolysemyDictionary::set(std::string lemma, Pos pos, std::size_t count) {
  if (count < 2) throw InvalidArgument("polysemy entry for \"" + lemma + "\" needs at least 2 senses");
  entries_[{std::move(lemma), pos}] = count;
}

bool PolysemyDictionary::contains(std::string_view lemma, Pos pos) const {
  return entries_.count({std::string(lemma), pos}) > 0;
}

std::size_t PolysemyDictionary::count(std::string_view lemma, Pos pos) const {
  auto it = entries_.find({std::string(lemma), pos});
  return it == entries_.end() ? 0 : it->second;
}

PolysemyDictionary build_polysemy_dict(const KnowledgeBase& kb) {
  std::map<PolysemyDictionary::Key, std::size_t> counts;
  for (const auto& sense : kb.senses()) ++counts[{sense.lemma, sense.pos}];
  PolysemyDictionary dict;
  for (auto& [key, count] : counts) {
    if (count >= 2) dict.set(key.first, key.second, count);
  }
  return dict;
}

void write_polysemy_tsv(const PolysemyDictionary& dict, std::ostream& out) {
  for (const auto& [key, count] : dict.entries())
    out << key.first << '\t' << to_string(key.second) << '\t' << count << '\n';
}

PolysemyDictionary read_polysemy_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open polysemy dictionary " + path);
  PolysemyDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string lemma, tag, count;
    if (!std::getline(fields, lemma, '\t') || !std::getline(fields, tag, '\t') || !std::getline(fields, count))
      throw ParseError(path, line_no, "expected lemma<TAB>pos<TAB>count");
    auto pos = parse_pos(tag);
    if (!pos) throw ParseError(path, line_no, "unknown POS tag \"" + tag + "\"");
    std::size_t n = 0;
    try {
      std::size_t used = 0;
      n = std::stoul(count, &used);
      if (used != count.size()) throw std::invalid_argument(count);
    } catch (const std::exception&) {
      throw ParseError(path, line_no, "bad count \"" + count + "\"");
    }
    if (n < 2) throw ParseError(path, line_no, "count must be >= 2");
    dict.set(lemma, *pos, n);
  }
  return dict;
}

}  // namespace swsds
