#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sess/error.hpp"

namespace sess {

using Scalar = double;

/// Raw encoder output. Stored unnormalized; cosine normalization happens
/// at similarity time.
using EmbeddingVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense n x m node-pair similarity matrix, entries in [0, 1].
using SimilarityMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

struct BBox {
  double x = 0, y = 0, w = 0, h = 0;
};

/// COCO-style run-length mask: column-major run counts, starting with a run
/// of zeros.
struct RleMask {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint32_t> counts;
};

struct Region {
  BBox bbox;
  std::optional<RleMask> mask;
};

struct GraphNode {
  std::int64_t id = 0;
  std::string label;
  Region region;
  EmbeddingVector embedding;
  std::optional<double> raw_importance;
};

struct GraphEdge {
  std::int64_t subject = 0;
  std::int64_t object = 0;
  std::string relation;
};

struct ImageMeta {
  std::string id;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

struct SceneGraph {
  ImageMeta image;
  EmbeddingVector image_embedding;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  /// Free-form provenance strings written by the exporter (crop policy,
  /// model versions). Not used for scoring.
  std::map<std::string, std::string> metadata;

  /// Index of the node with `id`, or -1.
  std::ptrdiff_t index_of(std::int64_t id) const;
};

/// Symmetric label x label similarity table with unit diagonal.
class RelationSimilarityTable {
 public:
  RelationSimilarityTable() = default;
  /// Throws InvalidArgument unless the table is square, symmetric within
  /// 1e-9, has a unit diagonal, entries in [0, 1], and labels are unique.
  RelationSimilarityTable(std::vector<std::string> labels, SimilarityMatrix matrix);

  const std::vector<std::string>& labels() const { return labels_; }
  const SimilarityMatrix& matrix() const { return matrix_; }
  std::optional<std::size_t> find(const std::string& label) const;
  bool empty() const { return labels_.empty(); }

 private:
  std::vector<std::string> labels_;
  SimilarityMatrix matrix_;
  std::map<std::string, std::size_t> index_;
};

struct HyperParams {
  double alpha = 0.25;
  double beta = 0.05;
  double gamma = 0.10;
  int iterations = 7;
  double k = 2.25;

  /// Validating factory; throws InvalidArgument on out-of-range values.
  static HyperParams make(double alpha, double beta, double gamma, int iterations,
                          double k);
  void validate() const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

struct MatchedPair {
  std::int64_t node1 = 0;
  std::int64_t node2 = 0;
  double weight = 0;
  double similarity = 0;
};

struct ScoreReport {
  double sess = 0;
  double image_score = 0;
  double graph_score = 0;
  std::vector<MatchedPair> matching;
  std::vector<SimilarityMatrix> snapshots;
  std::map<std::string, double> baselines;
};

/// Violations of the SceneGraph invariants, one message per rule broken.
/// `dimension` pins the session embedding dimension; 0 takes it from the
/// image embedding.
std::vector<std::string> validate_graph(const SceneGraph& g, std::size_t dimension = 0);

/// Throws InvalidGraph with all violations joined when validation fails.
void require_valid(const SceneGraph& g, std::size_t dimension = 0);

}  // namespace sess
