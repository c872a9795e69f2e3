#include "swsds/scorer.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <httplib.h>
#include <openssl/evp.h>

#include "swsds/log.hpp"

namespace swsds {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

bool valid_score(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::map<std::string, double> score_map(const nlohmann::json& j, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be an object of scores");
  std::map<std::string, double> out;
  for (auto& [key, value] : j.items()) {
    if (!value.is_number() || !valid_score(value.get<double>()))
      throw InvalidArgument(std::string(what) + " score for \"" + key + "\" must be a number in [0,1]");
    out[key] = value.get<double>();
  }
  return out;
}

}  // namespace

void MaskedQuery::validate() const {
  if (mask_index >= tokens.size()) throw InvalidArgument("mask_index out of range");
  if (tokens[mask_index] != mask) throw InvalidArgument("tokens[mask_index] is not the mask token");
  std::size_t masks = 0;
  for (const auto& t : tokens) masks += (t == mask);
  if (masks != 1) throw InvalidArgument("query must contain exactly one mask token");
}

std::string MaskedQuery::canonical() const {
  return nlohmann::json{{"mask_index", mask_index}, {"tokens", tokens}}.dump();
}

CandidateScores score_candidates(Scorer& scorer, const MaskedQuery& query,
                                 std::span<const std::string> candidates) {
  query.validate();
  if (candidates.empty()) throw InvalidArgument("candidate list is empty");
  std::set<std::string_view> unique(candidates.begin(), candidates.end());
  if (unique.size() != candidates.size()) throw InvalidArgument("candidate list has duplicates");

  auto result = scorer.score(query, candidates);
  for (const auto& c : candidates) {
    auto it = result.scores.find(c);
    if (it == result.scores.end())
      throw ScorerError(ScorerError::Kind::protocol, false, "no score for candidate \"" + c + "\"");
    if (!valid_score(it->second))
      throw ScorerError(ScorerError::Kind::protocol, false, "score for \"" + c + "\" outside [0,1]");
  }
  return result;
}

StubTable StubTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("stub table must be a JSON object");
  StubTable table;
  if (!j.contains("unigram") && !j.contains("cues") && !j.contains("vocabulary")) {
    table.unigram = score_map(j, "unigram table");
    return table;
  }
  if (auto it = j.find("unigram"); it != j.end()) table.unigram = score_map(*it, "unigram table");
  if (auto it = j.find("cues"); it != j.end()) {
    if (!it->is_object()) throw InvalidArgument("\"cues\" must be an object");
    for (auto& [cue, scores] : it->items()) table.cues[cue] = score_map(scores, "cue table");
  }
  if (auto it = j.find("vocabulary"); it != j.end()) {
    table.vocabulary = it->get<std::set<std::string>>();
  }
  return table;
}

StubTable StubTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stub table " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(path, 0, e.what());
  }
}

double stub_hash_score(std::uint64_t seed, const MaskedQuery& query, std::string_view candidate) {
  std::uint64_t h = kFnvOffset;
  for (int i = 0; i < 8; ++i) {
    char byte = static_cast<char>((seed >> (8 * i)) & 0xff);
    h = fnv1a(h, std::string_view(&byte, 1));
  }
  h = fnv1a(h, query.canonical());
  h = fnv1a(h, std::string_view("\0", 1));
  h = fnv1a(h, candidate);
  h = mix(h);
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

CandidateScores stub_score(const StubTable& table, std::uint64_t seed, const MaskedQuery& query,
                           std::span<const std::string> candidates) {
  CandidateScores out;
  for (const auto& c : candidates) {
    std::optional<double> cued;
    for (std::size_t i = 0; i < query.tokens.size(); ++i) {
      if (i == query.mask_index) continue;
      auto cue = table.cues.find(query.tokens[i]);
      if (cue == table.cues.end()) continue;
      if (auto hit = cue->second.find(c); hit != cue->second.end())
        cued = cued ? std::max(*cued, hit->second) : hit->second;
    }
    if (cued) {
      out.scores[c] = *cued;
    } else if (auto it = table.unigram.find(c); it != table.unigram.end()) {
      out.scores[c] = it->second;
    } else {
      out.scores[c] = stub_hash_score(seed, query, c);
    }
  }
  return out;
}

RemoteScorer::RemoteScorer(std::string endpoint, std::chrono::milliseconds timeout) : timeout_(timeout) {
  if (timeout.count() <= 0) throw InvalidArgument("scorer timeout must be positive");
  auto scheme = endpoint.find("://");
  if (scheme == std::string::npos || endpoint.substr(0, scheme) != "http")
    throw InvalidArgument("scorer endpoint must be an http:// URL: " + endpoint);
  auto path = endpoint.find('/', scheme + 3);
  origin_ = endpoint.substr(0, path);
  if (path != std::string::npos) prefix_ = endpoint.substr(path);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

CandidateScores RemoteScorer::score(const MaskedQuery& query, std::span<const std::string> candidates) {
  using Kind = ScorerError::Kind;
  nlohmann::json body = {{"tokens", query.tokens},
                         {"mask_index", query.mask_index},
                         {"candidates", std::vector<std::string>(candidates.begin(), candidates.end())}};

  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  {
    std::lock_guard lock(mutex_);
    ++requests_;
  }
  auto res = client.Post(prefix_ + "/v1/score", body.dump(), "application/json");
  if (!res) throw ScorerError(Kind::transport, true, "scorer unreachable: " + httplib::to_string(res.error()));

  const int status = res->status;
  if (status == 503) throw ScorerError(Kind::transport, true, "scorer not ready (503)");
  if (status == 400 || status == 422)
    throw ScorerError(Kind::protocol, false, "scorer rejected request (" + std::to_string(status) + "): " + res->body);
  if (status >= 500) throw ScorerError(Kind::transport, true, "scorer error " + std::to_string(status));
  if (status != 200) throw ScorerError(Kind::protocol, false, "unexpected status " + std::to_string(status));

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(Kind::protocol, false, std::string("malformed scorer response: ") + e.what());
  }
  auto scores = reply.find("scores");
  if (!reply.is_object() || scores == reply.end() || !scores->is_object())
    throw ScorerError(Kind::protocol, false, "scorer response lacks a \"scores\" object");

  CandidateScores out;
  for (const auto& c : candidates) {
    auto it = scores->find(c);
    if (it == scores->end() || !it->is_number() || !valid_score(it->get<double>()))
      throw ScorerError(Kind::protocol, false, "missing or invalid score for \"" + c + "\"");
    out.scores[c] = it->get<double>();
  }
  if (auto model = reply.find("model"); model != reply.end() && model->is_string()) {
    std::lock_guard lock(mutex_);
    model_ = model->get<std::string>();
  }
  return out;
}

std::string RemoteScorer::model() const {
  std::lock_guard lock(mutex_);
  return model_;
}

std::size_t RemoteScorer::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

CachedScorer::CachedScorer(std::shared_ptr<Scorer> inner, std::string cache_path)
    : inner_(std::move(inner)), path_(std::move(cache_path)) {
  if (!inner_) throw InvalidArgument("cached scorer needs an inner scorer");
  load();
}

void CachedScorer::load() {
  std::ifstream in(path_);
  if (!in) return;  // cold cache
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto key = j.at("k").get<std::string>();
      auto value = j.at("v").get<double>();
      if (key.find(':') == std::string::npos || !valid_score(value)) throw std::invalid_argument("bad entry");
      table_[key] = value;
    } catch (const std::exception&) {
      ++skipped_lines_;
      log::warn("cache.corrupt_line", {{"path", path_}, {"line", line_no}});
    }
  }
}

void CachedScorer::append(const std::vector<std::pair<std::string, double>>& rows) {
  std::lock_guard lock(write_mutex_);
  std::ofstream out(path_, std::ios::app);
  if (out) {
    for (const auto& [key, value] : rows) out << nlohmann::json{{"k", key}, {"v", value}}.dump() << '\n';
  }
  if (!out) log::warn("cache.write_failed", {{"path", path_}});
}

CandidateScores CachedScorer::score(const MaskedQuery& query, std::span<const std::string> candidates) {
  const auto digest = sha256_hex(query.canonical());
  CandidateScores out;
  std::vector<std::string> missing;
  {
    std::shared_lock lock(table_mutex_);
    for (const auto& c : candidates) {
      auto it = table_.find(digest + ":" + c);
      if (it != table_.end()) {
        out.scores[c] = it->second;
      } else {
        missing.push_back(c);
      }
    }
  }
  {
    std::unique_lock lock(table_mutex_);
    hits_ += candidates.size() - missing.size();
    misses_ += missing.size();
  }
  if (missing.empty()) return out;

  auto fresh = inner_->score(query, missing);
  std::vector<std::pair<std::string, double>> rows;
  {
    std::unique_lock lock(table_mutex_);
    for (const auto& c : missing) {
      auto it = fresh.scores.find(c);
      if (it == fresh.scores.end()) continue;
      out.scores[c] = it->second;
      if (table_.emplace(digest + ":" + c, it->second).second) rows.emplace_back(digest + ":" + c, it->second);
    }
  }
  if (!rows.empty()) append(rows);
  return out;
}

std::size_t CachedScorer::hits() const {
  std::shared_lock lock(table_mutex_);
  return hits_;
}

std::size_t CachedScorer::misses() const {
  std::shared_lock lock(table_mutex_);
  return misses_;
}

std::size_t CachedScorer::entries() const {
  std::shared_lock lock(table_mutex_);
  return table_.size();
}

std::shared_ptr<Scorer> make_scorer(const ScorerConfig& config) {
  if (config.timeout.count() <= 0) throw InvalidArgument("scorer timeout must be positive");
  std::shared_ptr<Scorer> scorer;
  if (config.endpoint) {
    scorer = std::make_shared<RemoteScorer>(*config.endpoint, config.timeout);
  } else {
    StubTable table = config.stub_table_path ? StubTable::load(*config.stub_table_path) : StubTable{};
    scorer = std::make_shared<StubScorer>(std::move(table), config.stub_seed);
  }
  if (config.cache_path) scorer = std::make_shared<CachedScorer>(std::move(scorer), *config.cache_path);
  return scorer;
}

}  // namespace swsds
