#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "sess/core.hpp"

namespace sess {

/// Cosine similarity clamped at zero. Throws DimensionMismatch on differing
/// lengths and ZeroVector when either vector is all zeros.
template <typename DerivedA, typename DerivedB>
double clip_score(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "clip_score: embedding dimensions differ (" +
                                                  std::to_string(a.size()) + " vs " +
                                                  std::to_string(b.size()) + ")");
  const double na = a.norm(), nb = b.norm();
  if (a.size() == 0 || na == 0.0 || nb == 0.0)
    throw Error(ErrorCode::ZeroVector, "clip_score: zero embedding");
  const double c = a.dot(b) / (na * nb);
  return std::clamp(c, 0.0, 1.0);
}

/// Label-level relation similarity: table lookup, else 1 for identical
/// labels and 0.5 for distinct ones.
double relation_similarity(const std::string& r1, const std::string& r2,
                           const RelationSimilarityTable& table);

inline constexpr double kUnknownRelationSimilarity = 0.5;

/// Source of node, image and relation similarities. Embedding-backed
/// similarities read the vectors stored on nodes and graphs.
class SimilarityProvider {
 public:
  SimilarityProvider() = default;
  explicit SimilarityProvider(RelationSimilarityTable table) : table_(std::move(table)) {}

  double node_similarity(const GraphNode& u, const GraphNode& v) const {
    return clip_score(u.embedding, v.embedding);
  }
  double image_similarity(const SceneGraph& a, const SceneGraph& b) const {
    return clip_score(a.image_embedding, b.image_embedding);
  }
  double relation_similarity(const std::string& r1, const std::string& r2) const {
    return sess::relation_similarity(r1, r2, table_);
  }
  const RelationSimilarityTable& relation_table() const { return table_; }

 private:
  RelationSimilarityTable table_;
};

/// The 56 predicate labels of the panoptic scene graph vocabulary.
const std::vector<std::string>& psg_relation_labels();

/// Deterministic stand-in for neural encoders: a seeded relation table over
/// the PSG vocabulary plus a keyed embedding generator.
class MockProvider {
 public:
  MockProvider(std::uint64_t seed, int dimension);

  const SimilarityProvider& provider() const { return provider_; }
  int dimension() const { return dimension_; }
  std::uint64_t seed() const { return seed_; }

  /// Pseudo-random embedding determined by (seed, key); entries uniform in
  /// [-1, 1] with a positive bias so typical cosines are nonnegative.
  EmbeddingVector embedding(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  int dimension_;
  SimilarityProvider provider_;
};

/// Throws InvalidArgument when dimension < 2.
MockProvider mock_provider(std::uint64_t seed, int dimension);

}  // namespace sess
