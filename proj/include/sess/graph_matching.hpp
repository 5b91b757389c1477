#pragma once

#include <string>
#include <vector>

#include "sess/assignment.hpp"
#include "sess/core.hpp"
#include "sess/importance.hpp"
#include "sess/providers.hpp"
#include "sess/raster.hpp"

namespace sess {

/// A node adjacent to some node u, with the relation labels of the edges
/// joining them split by orientation.
struct Neighbor {
  Eigen::Index node = 0;
  std::vector<std::string> outgoing;  // u -> neighbor
  std::vector<std::string> incoming;  // neighbor -> u
};

using Neighborhoods = std::vector<std::vector<Neighbor>>;

/// Neighborhoods over edges in either direction, neighbors in ascending
/// node-index order.
Neighborhoods build_neighborhoods(const SceneGraph& g);

/// Everything one graph comparison needs. Holds references; the graphs and
/// provider must outlive it.
class MatchContext {
 public:
  /// Throws DimensionMismatch when the graphs' embedding dimensions differ
  /// and InvalidArgument when an importance vector is not sized to its
  /// graph.
  MatchContext(const SceneGraph& g1, const SceneGraph& g2, const SimilarityProvider& provider,
               const HyperParams& params, ImportanceDistribution imp1, ImportanceDistribution imp2);

  const SceneGraph& g1() const { return *g1_; }
  const SceneGraph& g2() const { return *g2_; }
  const SimilarityProvider& provider() const { return *provider_; }
  const HyperParams& params() const { return params_; }
  const ImportanceDistribution& imp1() const { return imp1_; }
  const ImportanceDistribution& imp2() const { return imp2_; }
  const Neighborhoods& neighbors1() const { return nb1_; }
  const Neighborhoods& neighbors2() const { return nb2_; }

  /// Relation term of the neighbor matrix for (u, v): entry (k, l) is the
  /// best relation similarity over same-orientation edge pairs joining
  /// u to its k-th neighbor and v to its l-th neighbor, 0 when none.
  SimilarityMatrix relation_block(Eigen::Index u, Eigen::Index v) const;

 private:
  const SceneGraph* g1_;
  const SceneGraph* g2_;
  const SimilarityProvider* provider_;
  HyperParams params_;
  ImportanceDistribution imp1_, imp2_;
  Neighborhoods nb1_, nb2_;
};

/// L(i, j) = node similarity of g1 node i and g2 node j.
SimilarityMatrix initial_matrix(const MatchContext& ctx);

/// Neighbor-matching score of pair (u, v) against the current matrix L.
double neighbor_score(Eigen::Index u, Eigen::Index v, const SimilarityMatrix& L,
                      const MatchContext& ctx);

/// Runs params().iterations synchronous propagation sweeps starting at L0.
/// When `snapshots` is non-null the matrix after each sweep is appended.
SimilarityMatrix iterate(const SimilarityMatrix& L0, const MatchContext& ctx,
                         std::vector<SimilarityMatrix>* snapshots = nullptr);

struct WeightedMatch {
  double score = 0;
  Matching<double> matching;
};

/// Maximum over injective matchings of sum ((imp1_i + imp2_j) / 2) * L(i, j).
WeightedMatch weighted_matching_score(const SimilarityMatrix& L,
                                      const ImportanceDistribution& imp1,
                                      const ImportanceDistribution& imp2);

struct SessOptions {
  /// Source rasters used for pixel importance when nodes lack raw_importance.
  const Raster* image1 = nullptr;
  const Raster* image2 = nullptr;
  bool keep_snapshots = false;
};

/// Semantic similarity of two scene graphs.
ScoreReport sess(const SceneGraph& g1, const SceneGraph& g2, const SimilarityProvider& provider,
                 const HyperParams& params, const SessOptions& options = {});

}  // namespace sess
