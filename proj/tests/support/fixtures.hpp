#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "swsds/kb.hpp"

namespace swsds::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("swsds-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json leaf(const std::string& sememe, const std::string& relation = "") {
  nlohmann::json j = {{"sememe", sememe}, {"children", nlohmann::json::array()}};
  if (!relation.empty()) j["relation"] = relation;
  return j;
}

inline nlohmann::json fruit_annotation() { return leaf("fruit|水果"); }

inline nlohmann::json computer_annotation() {
  auto root = leaf("computer|电脑");
  root["children"].push_back(leaf("able|能", "modifier"));
  root["children"].push_back(leaf("SpeBrand|特定牌子", "modifier"));
  return root;
}

inline std::string sense_line(const std::string& id, const std::string& lemma, const std::string& pos,
                              const nlohmann::json& annotation, const std::string& gloss = "") {
  nlohmann::json j = {{"sense_id", id}, {"lemma", lemma}, {"pos", pos}};
  if (!gloss.empty()) j["gloss"] = gloss;
  j["annotation"] = annotation;
  return j.dump() + "\n";
}

inline const std::vector<std::string>& fruit_synonym_lemmas() {
  static const std::vector<std::string> lemmas = {"pear",  "banana", "peach", "plum",    "grape", "mango",
                                                  "cherry", "orange", "lemon", "apricot", "fig"};
  return lemmas;
}

// "Apple" with a computer sense (3 sememes) and a fruit sense (1 sememe);
// twelve senses share the fruit annotation, three share the computer one.
// "full" (v) and "art" (n) carry two senses each.
inline std::string apple_kb_jsonl() {
  std::string text;
  text += sense_line("244397", "Apple", "n", fruit_annotation(), "fruit");
  text += sense_line("244396", "Apple", "n", computer_annotation(), "computer");
  int id = 300000;
  for (const auto& lemma : fruit_synonym_lemmas()) text += sense_line(std::to_string(id++), lemma, "n", fruit_annotation());
  text += sense_line("300100", "Mac", "n", computer_annotation());
  text += sense_line("300101", "iMac", "n", computer_annotation());
  text += sense_line("400001", "full", "v", leaf("fill|填充"));
  text += sense_line("400002", "full", "v", leaf("satiated|饱"));
  text += sense_line("400003", "art", "n", leaf("InstitutePlace|场所"));
  text += sense_line("400004", "art", "n", leaf("method|方法"));
  text += sense_line("400005", "insist", "v", leaf("insist|坚持"));
  return text;
}

inline KnowledgeBase apple_kb() {
  std::istringstream in(apple_kb_jsonl());
  return parse_kb(in, "apple-kb");
}

}  // namespace swsds::testing
