#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "swsds/embedding_store.hpp"
#include "swsds/errors.hpp"
#include "swsds/sense_key.hpp"
#include "swsds/transport.hpp"

namespace swsds {

class EmptyDocumentError : public Error {
 public:
  EmptyDocumentError() : Error("document has no tokens with vectors") {}
};

enum class GroundMetric { euclidean, cosine };

// Sense keys resolve to themselves when stored, else to their lemma part.
template <typename Scalar>
std::optional<std::string> resolve(std::string_view token, const BasicEmbeddingStore<Scalar>& store) {
  if (store.contains(token)) return std::string(token);
  if (auto parts = split_sense_key(token); parts && store.contains(parts->lemma)) return std::string(parts->lemma);
  return std::nullopt;
}

// Normalized bag-of-words over resolvable tokens; keys sorted.
template <typename Scalar>
struct NbowWeights {
  std::vector<std::string> keys;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  Eigen::Index size() const noexcept { return weights.size(); }
};

template <typename Scalar>
NbowWeights<Scalar> nbow(std::span<const std::string> doc, const BasicEmbeddingStore<Scalar>& store) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& token : doc) {
    if (auto key = resolve(token, store)) {
      ++counts[*key];
      ++total;
    }
  }
  if (total == 0) throw EmptyDocumentError();
  NbowWeights<Scalar> out;
  out.weights.resize(static_cast<Eigen::Index>(counts.size()));
  Eigen::Index i = 0;
  for (auto& [key, count] : counts) {
    out.keys.push_back(key);
    out.weights[i++] = static_cast<Scalar>(count) / static_cast<Scalar>(total);
  }
  return out;
}

// Stacks the vectors of the nbow keys as columns.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> embedding_matrix(const NbowWeights<Scalar>& doc,
                                                                       const BasicEmbeddingStore<Scalar>& store) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x(store.dim(), doc.size());
  for (Eigen::Index i = 0; i < doc.size(); ++i) x.col(i) = *store.find(doc.keys[i]);
  return x;
}

template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> pairwise_cost(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    GroundMetric metric = GroundMetric::euclidean) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (metric == GroundMetric::euclidean) {
        c(i, j) = (a.col(i) - b.col(j)).norm();
      } else {
        const Scalar denom = a.col(i).norm() * b.col(j).norm();
        c(i, j) = denom > 0 ? std::max(Scalar(0), Scalar(1) - a.col(i).dot(b.col(j)) / denom) : Scalar(1);
      }
    }
  }
  return c;
}

template <typename Scalar>
struct TransportPlan {
  struct Flow {
    std::string from;
    std::string to;
    Scalar mass;
  };
  std::vector<Flow> flows;  // positive entries only
  Scalar objective = 0;
};

template <typename Scalar>
struct WmdResult {
  Scalar distance = 0;
  TransportPlan<Scalar> plan;
  NbowWeights<Scalar> source;
  NbowWeights<Scalar> target;
};

// Word Mover's Distance: optimal transport cost between the two nBOW
// distributions under the ground metric, solved exactly.
template <typename Scalar>
WmdResult<Scalar> wmd(std::span<const std::string> doc1, std::span<const std::string> doc2,
                      const BasicEmbeddingStore<Scalar>& store, GroundMetric metric = GroundMetric::euclidean) {
  WmdResult<Scalar> out;
  out.source = nbow(doc1, store);
  out.target = nbow(doc2, store);
  const auto cost = pairwise_cost(embedding_matrix(out.source, store), embedding_matrix(out.target, store), metric);
  const auto sol = solve_transport(out.source.weights, out.target.weights, cost);
  out.distance = std::max(Scalar(0), sol.objective);
  out.plan.objective = out.distance;
  for (Eigen::Index i = 0; i < sol.flow.rows(); ++i) {
    for (Eigen::Index j = 0; j < sol.flow.cols(); ++j) {
      if (sol.flow(i, j) > 0) out.plan.flows.push_back({out.source.keys[i], out.target.keys[j], sol.flow(i, j)});
    }
  }
  return out;
}

template <typename Scalar>
Scalar wmd_distance(std::span<const std::string> doc1, std::span<const std::string> doc2,
                    const BasicEmbeddingStore<Scalar>& store, GroundMetric metric = GroundMetric::euclidean) {
  return wmd(doc1, doc2, store, metric).distance;
}

// Word centroid distance: Euclidean distance between the weighted centroids.
template <typename Scalar>
Scalar wcd(std::span<const std::string> doc1, std::span<const std::string> doc2,
           const BasicEmbeddingStore<Scalar>& store) {
  const auto a = nbow(doc1, store), b = nbow(doc2, store);
  return (embedding_matrix(a, store) * a.weights - embedding_matrix(b, store) * b.weights).norm();
}

// Relaxed WMD: each side moves all of its mass to its nearest counterpart
// word; the larger of the two one-sided costs.
template <typename Scalar>
Scalar rwmd(std::span<const std::string> doc1, std::span<const std::string> doc2,
            const BasicEmbeddingStore<Scalar>& store, GroundMetric metric = GroundMetric::euclidean) {
  const auto a = nbow(doc1, store), b = nbow(doc2, store);
  const auto c = pairwise_cost(embedding_matrix(a, store), embedding_matrix(b, store), metric);
  const Scalar forward = a.weights.dot(c.rowwise().minCoeff());
  const Scalar backward = b.weights.dot(c.colwise().minCoeff().transpose());
  return std::max(forward, backward);
}

enum class PairDecision { match, no_match };

template <typename Scalar>
PairDecision classify_pair(std::span<const std::string> doc1, std::span<const std::string> doc2,
                           const BasicEmbeddingStore<Scalar>& store, Scalar threshold,
                           GroundMetric metric = GroundMetric::euclidean) {
  if (!std::isfinite(threshold)) throw InvalidArgument("threshold must be finite");
  return wmd_distance(doc1, doc2, store, metric) <= threshold ? PairDecision::match : PairDecision::no_match;
}

}  // namespace swsds
