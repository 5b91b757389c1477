#pragma once

// Straight-line scalar evaluation of the scoring pipeline, written without
// Eigen or the Hungarian solver. Used only as a test oracle on small graphs.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sess/core.hpp"

namespace sess::testing {

using Grid = std::vector<std::vector<double>>;
using RelationFn = std::function<double(const std::string&, const std::string&)>;

inline double ref_cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0, na = 0, nb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return c < 0 ? 0 : (c > 1 ? 1 : c);
}

/// Exhaustive maximum over injective row->column assignments.
inline double ref_best_assignment(const Grid& w) {
  const std::size_t n = w.size();
  if (n == 0 || w[0].empty()) return 0;
  const std::size_t m = w[0].size();
  std::vector<bool> used(m, false);
  double best = 0;
  std::function<void(std::size_t, double)> go = [&](std::size_t row, double sum) {
    if (row == n) {
      best = std::max(best, sum);
      return;
    }
    go(row + 1, sum);  // leave row unmatched
    for (std::size_t c = 0; c < m; ++c) {
      if (used[c]) continue;
      used[c] = true;
      go(row + 1, sum + w[row][c]);
      used[c] = false;
    }
  };
  go(0, 0);
  return best;
}

struct RefNeighbor {
  std::size_t node;
  std::vector<std::string> out, in;
};

inline std::vector<std::vector<RefNeighbor>> ref_neighbors(const SceneGraph& g) {
  std::vector<std::vector<RefNeighbor>> nb(g.nodes.size());
  auto idx = [&](std::int64_t id) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i].id == id) return i;
    return g.nodes.size();
  };
  auto entry = [&](std::size_t at, std::size_t other) -> RefNeighbor& {
    for (auto& r : nb[at])
      if (r.node == other) return r;
    nb[at].push_back({other, {}, {}});
    return nb[at].back();
  };
  for (const auto& e : g.edges) {
    const std::size_t s = idx(e.subject), o = idx(e.object);
    entry(s, o).out.push_back(e.relation);
    entry(o, s).in.push_back(e.relation);
  }
  return nb;
}

inline std::vector<double> ref_importance(const SceneGraph& g, double k) {
  const std::size_t n = g.nodes.size();
  std::vector<double> w(n, n ? 1.0 / n : 0.0);
  bool all = n > 0;
  for (const auto& v : g.nodes) all = all && v.raw_importance.has_value();
  if (!all) return w;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) total += (w[i] = std::pow(*g.nodes[i].raw_importance, 1.0 / k));
  if (total <= 0) return std::vector<double>(n, 1.0 / n);
  for (auto& x : w) x /= total;
  return w;
}

struct RefResult {
  double sess = 0, image_score = 0, graph_score = 0;
  Grid final_matrix;
};

inline RefResult reference_sess(const SceneGraph& g1, const SceneGraph& g2, const RelationFn& rel,
                                const HyperParams& p) {
  RefResult r;
  r.image_score = ref_cosine(g1.image_embedding, g2.image_embedding);
  const std::size_t n = g1.nodes.size(), m = g2.nodes.size();
  if (n == 0 && m == 0) {
    r.graph_score = r.sess = r.image_score;
    return r;
  }
  if (n == 0 || m == 0) {
    r.sess = p.gamma * r.image_score;
    return r;
  }

  Grid L(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) L[i][j] = ref_cosine(g1.nodes[i].embedding, g2.nodes[j].embedding);

  const auto nb1 = ref_neighbors(g1), nb2 = ref_neighbors(g2);
  auto best_rel = [&](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    double best = 0;
    for (const auto& x : a)
      for (const auto& y : b) best = std::max(best, rel(x, y));
    return best;
  };

  for (int it = 0; it < p.iterations; ++it) {
    Grid next = L;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < m; ++v) {
        const auto& A = nb1[u];
        const auto& B = nb2[v];
        double score;
        if (A.empty() && B.empty()) {
          score = L[u][v];
        } else if (A.empty() || B.empty()) {
          score = 0;
        } else {
          Grid local(A.size(), std::vector<double>(B.size()));
          for (std::size_t k = 0; k < A.size(); ++k)
            for (std::size_t l = 0; l < B.size(); ++l) {
              const double relation = std::max(best_rel(A[k].out, B[l].out), best_rel(A[k].in, B[l].in));
              local[k][l] = p.alpha * L[A[k].node][B[l].node] + (1 - p.alpha) * relation;
            }
          score = ref_best_assignment(local) / static_cast<double>(std::max(A.size(), B.size()));
        }
        double x = (1 - p.beta) * L[u][v] + p.beta * score;
        next[u][v] = x < 0 ? 0 : (x > 1 ? 1 : x);
      }
    L = next;
  }

  const auto imp1 = ref_importance(g1, p.k), imp2 = ref_importance(g2, p.k);
  Grid W(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) W[i][j] = (imp1[i] + imp2[j]) / 2 * L[i][j];
  r.graph_score = ref_best_assignment(W);
  r.sess = (1 - p.gamma) * r.graph_score + p.gamma * r.image_score;
  r.final_matrix = L;
  return r;
}

}  // namespace sess::testing
