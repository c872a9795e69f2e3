#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "swsds/errors.hpp"
#include "swsds/sense_key.hpp"

namespace swsds {

// Word and sense vectors of one fixed dimension, keyed by lemma or "lemma=sense_id".
// Value type: copy for a snapshot; mutation is single-writer.
template <typename Scalar>
class BasicEmbeddingStore {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicEmbeddingStore(Eigen::Index dim = 1) : dim_(dim) {
    if (dim <= 0) throw InvalidArgument("embedding dimension must be positive");
  }

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return table_.size(); }
  bool empty() const noexcept { return table_.empty(); }

  bool contains(std::string_view key) const { return table_.find(key) != table_.end(); }

  const Vector* find(std::string_view key) const {
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::optional<Vector> get(std::string_view key) const {
    if (const Vector* v = find(key)) return *v;
    return std::nullopt;
  }

  // Rejects wrong dimension, non-finite components, malformed keys, and
  // existing keys unless overwrite is set.
  void insert(std::string key, Vector vector, bool overwrite = false) {
    if (vector.size() != dim_)
      throw DimensionMismatchError("vector for \"" + key + "\" has " + std::to_string(vector.size()) +
                                   " components, store dimension is " + std::to_string(dim_));
    if (!vector.allFinite()) throw InvalidArgument("vector for \"" + key + "\" has non-finite components");
    if (auto problem = key_problem(key)) throw InvalidArgument(*problem);
    auto it = table_.find(key);
    if (it != table_.end()) {
      if (!overwrite) throw DuplicateKeyError(key, "embedding store");
      it->second = std::move(vector);
      return;
    }
    table_.emplace(std::move(key), std::move(vector));
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    out.reserve(table_.size());
    for (const auto& [key, _] : table_) out.push_back(key);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Keys may not be empty or contain whitespace; a key containing '=' must be a sense key.
  static std::optional<std::string> key_problem(std::string_view key) {
    if (key.empty()) return "empty key";
    if (key.find_first_of(" \t\r\n") != std::string_view::npos)
      return "key \"" + std::string(key) + "\" contains whitespace";
    if (key.find('=') != std::string_view::npos && !is_sense_key(key))
      return "key \"" + std::string(key) + "\" contains '=' but is not of the form lemma=sense_id";
    return std::nullopt;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  Eigen::Index dim_;
  std::unordered_map<std::string, Vector, Hash, std::equal_to<>> table_;
};

using EmbeddingStore = BasicEmbeddingStore<double>;

namespace detail {

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    fields.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  // tolerate trailing separators written by common word2vec tools
  while (!fields.empty() && fields.back().empty()) fields.pop_back();
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

template <typename Scalar>
std::string format_scalar(Scalar value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

// word2vec text format: header "count dim", then count lines "key c1 ... c_dim".
template <typename Scalar = double>
BasicEmbeddingStore<Scalar> load_word2vec_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path, 1, "missing header \"count dim\"");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = detail::split_spaces(line);
  std::size_t count = 0;
  long long dim = 0;
  if (header.size() != 2 || !detail::parse_number(header[0], count) || !detail::parse_number(header[1], dim) ||
      dim <= 0)
    throw ParseError(path, 1, "header must be \"count dim\" with positive dim");

  BasicEmbeddingStore<Scalar> store(static_cast<Eigen::Index>(dim));
  std::size_t line_no = 1;
  typename BasicEmbeddingStore<Scalar>::Vector v(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (store.size() == count) throw ParseError(path, line_no, "more entries than the header count " + std::to_string(count));
    auto fields = detail::split_spaces(line);
    if (fields.size() != static_cast<std::size_t>(dim) + 1)
      throw DimensionMismatchError("expected " + std::to_string(dim) + " components, found " +
                                       std::to_string(fields.empty() ? 0 : fields.size() - 1),
                                   line_no);
    for (long long i = 0; i < dim; ++i) {
      if (!detail::parse_number(fields[i + 1], v[i]) || !std::isfinite(v[i]))
        throw ParseError(path, line_no, "bad component \"" + std::string(fields[i + 1]) + "\"");
    }
    std::string key(fields[0]);
    if (auto problem = BasicEmbeddingStore<Scalar>::key_problem(key)) throw ParseError(path, line_no, *problem);
    if (store.contains(key)) throw DuplicateKeyError(key, path + ":" + std::to_string(line_no));
    store.insert(std::move(key), v);
  }
  if (store.size() != count)
    throw ParseError(path, line_no, "header declares " + std::to_string(count) + " entries, found " +
                                        std::to_string(store.size()));
  return store;
}

// Keys in sorted order; components in shortest round-trip decimal form.
template <typename Scalar>
void save_word2vec_text(const BasicEmbeddingStore<Scalar>& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embeddings " + path);
  out << store.size() << ' ' << store.dim() << '\n';
  for (const auto& key : store.keys()) {
    out << key;
    for (auto x : *store.find(key)) out << ' ' << detail::format_scalar(x);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

// Private binary snapshot for fast reloads; layout is host-endian and not an interchange format.
template <typename Scalar>
void save_binary_cache(const BasicEmbeddingStore<Scalar>& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embedding cache " + path);
  const char magic[8] = {'S', 'W', 'E', 'M', 'B', '0', '0', static_cast<char>(sizeof(Scalar))};
  out.write(magic, sizeof magic);
  const std::uint64_t dim = store.dim(), count = store.size();
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (const auto& key : store.keys()) {
    const std::uint32_t len = static_cast<std::uint32_t>(key.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(key.data(), len);
    out.write(reinterpret_cast<const char*>(store.find(key)->data()), sizeof(Scalar) * dim);
  }
  if (!out) throw IoError("write failed: " + path);
}

template <typename Scalar = double>
BasicEmbeddingStore<Scalar> load_binary_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding cache " + path);
  char magic[8];
  std::uint64_t dim = 0, count = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || std::string_view(magic, 7) != "SWEMB00" || magic[7] != static_cast<char>(sizeof(Scalar)) || dim == 0)
    throw ParseError(path, 0, "not an embedding cache for this scalar type");
  BasicEmbeddingStore<Scalar> store(static_cast<Eigen::Index>(dim));
  typename BasicEmbeddingStore<Scalar>::Vector v(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    std::string key(len, '\0');
    in.read(key.data(), len);
    in.read(reinterpret_cast<char*>(v.data()), sizeof(Scalar) * dim);
    if (!in) throw ParseError(path, 0, "truncated embedding cache");
    store.insert(std::move(key), v);
  }
  return store;
}

}  // namespace swsds
