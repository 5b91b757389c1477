#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sess/core.hpp"
#include "sess/providers.hpp"
#include "sess/random.hpp"

namespace sess {

struct AnnotationCandidate {
  std::string graph;
  double human_score = 0;
};

/// One annotated group: an original image and its scored candidates,
/// referenced by graph file path.
struct AnnotationRecord {
  std::string original;
  std::vector<AnnotationCandidate> candidates;
};

/// Annotation data with graphs resolved in memory.
struct AnnotatedDataset {
  struct Pair {
    std::size_t original = 0;
    std::size_t candidate = 0;
    double human_score = 0;
  };
  std::vector<SceneGraph> graphs;
  std::vector<Pair> pairs;

  /// Appends a graph and returns its index.
  std::size_t add_graph(SceneGraph g);
  void add_pair(std::size_t original, std::size_t candidate, double human_score);
};

struct SearchSpace {
  double alpha_min = 0, alpha_max = 1;
  double beta_min = 0, beta_max = 1;
  double gamma_min = 0, gamma_max = 1;
  int iterations_min = 0, iterations_max = 12;
  double k_min = 1, k_max = 4;

  /// Bounds must nest inside the admissible hyperparameter ranges.
  void validate() const;
  HyperParams sample(Rng& rng) const;
};

struct TrialResult {
  HyperParams params;
  double pearson = 0;
  double mae = 0;
  int n_pairs = 0;
  /// Set when either score series has zero variance; pearson is then 0.
  bool degenerate = false;
};

struct SearchResult {
  TrialResult best;
  std::size_t best_index = 0;
  std::vector<TrialResult> history;
};

/// Pearson correlation; returns 0 and sets `degenerate` on zero variance.
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b,
                           bool* degenerate = nullptr);

/// sess for every annotated pair; row order follows dataset.pairs.
std::vector<double> score_pairs(const HyperParams& params, const AnnotatedDataset& dataset,
                                const SimilarityProvider& provider);

/// Throws InsufficientPairs when the dataset has fewer than two pairs.
TrialResult evaluate_params(const HyperParams& params, const AnnotatedDataset& dataset,
                            const SimilarityProvider& provider);

/// True when `a` ranks strictly above `b`: higher pearson, then lower mae.
bool better_trial(const TrialResult& a, const TrialResult& b);

using TrialCallback = std::function<void(std::size_t index, const TrialResult&)>;

/// Seeded random search. Parameters for all trials are drawn up front in
/// trial order, so the history is independent of evaluation scheduling.
/// `threads` = 0 picks the hardware concurrency.
SearchResult random_search(const SearchSpace& space, const AnnotatedDataset& dataset,
                           const SimilarityProvider& provider, int trials, std::uint64_t seed,
                           unsigned threads = 0, const TrialCallback& on_trial = {});

}  // namespace sess
