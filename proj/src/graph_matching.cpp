#include "sess/graph_matching.hpp"

#include <algorithm>
#include <map>

namespace sess {

Neighborhoods build_neighborhoods(const SceneGraph& g) {
  const auto n = g.nodes.size();
  std::vector<std::map<Eigen::Index, Neighbor>> by_node(n);
  for (const auto& e : g.edges) {
    const auto s = g.index_of(e.subject);
    const auto o = g.index_of(e.object);
    if (s < 0 || o < 0 || s == o)
      throw Error(ErrorCode::InvalidGraph, "edge endpoint unresolved or self-loop");
    auto& fwd = by_node[static_cast<std::size_t>(s)][o];
    fwd.node = o;
    fwd.outgoing.push_back(e.relation);
    auto& bwd = by_node[static_cast<std::size_t>(o)][s];
    bwd.node = s;
    bwd.incoming.push_back(e.relation);
  }
  Neighborhoods out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto& [idx, nb] : by_node[i]) out[i].push_back(std::move(nb));
  return out;
}

MatchContext::MatchContext(const SceneGraph& g1, const SceneGraph& g2,
                           const SimilarityProvider& provider, const HyperParams& params,
                           ImportanceDistribution imp1, ImportanceDistribution imp2)
    : g1_(&g1), g2_(&g2), provider_(&provider), params_(params), imp1_(std::move(imp1)),
      imp2_(std::move(imp2)), nb1_(build_neighborhoods(g1)), nb2_(build_neighborhoods(g2)) {
  params_.validate();
  if (g1.image_embedding.size() != g2.image_embedding.size())
    throw Error(ErrorCode::DimensionMismatch, "graphs use different embedding dimensions (" +
                                                  std::to_string(g1.image_embedding.size()) +
                                                  " vs " +
                                                  std::to_string(g2.image_embedding.size()) + ")");
  if (imp1_.size() != static_cast<Eigen::Index>(g1.nodes.size()) ||
      imp2_.size() != static_cast<Eigen::Index>(g2.nodes.size()))
    throw Error(ErrorCode::InvalidArgument, "importance distribution not sized to node count");
}

SimilarityMatrix MatchContext::relation_block(Eigen::Index u, Eigen::Index v) const {
  const auto& nu = nb1_[static_cast<std::size_t>(u)];
  const auto& nv = nb2_[static_cast<std::size_t>(v)];
  SimilarityMatrix r = SimilarityMatrix::Zero(static_cast<Eigen::Index>(nu.size()),
                                              static_cast<Eigen::Index>(nv.size()));
  auto best = [&](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    double m = 0;
    for (const auto& x : a)
      for (const auto& y : b) m = std::max(m, provider_->relation_similarity(x, y));
    return m;
  };
  for (std::size_t k = 0; k < nu.size(); ++k)
    for (std::size_t l = 0; l < nv.size(); ++l)
      r(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) =
          std::max(best(nu[k].outgoing, nv[l].outgoing), best(nu[k].incoming, nv[l].incoming));
  return r;
}

SimilarityMatrix initial_matrix(const MatchContext& ctx) {
  const auto& a = ctx.g1().nodes;
  const auto& b = ctx.g2().nodes;
  SimilarityMatrix L(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          ctx.provider().node_similarity(a[i], b[j]);
  return L;
}

namespace {

double neighbor_score_with(Eigen::Index u, Eigen::Index v, const SimilarityMatrix& L,
                           const SimilarityMatrix& relations, const MatchContext& ctx) {
  const auto& nu = ctx.neighbors1()[static_cast<std::size_t>(u)];
  const auto& nv = ctx.neighbors2()[static_cast<std::size_t>(v)];
  if (nu.empty() && nv.empty()) return L(u, v);
  if (nu.empty() || nv.empty()) return 0.0;
  const double alpha = ctx.params().alpha;
  SimilarityMatrix local(relations.rows(), relations.cols());
  for (Eigen::Index k = 0; k < local.rows(); ++k)
    for (Eigen::Index l = 0; l < local.cols(); ++l)
      local(k, l) = alpha * L(nu[static_cast<std::size_t>(k)].node, nv[static_cast<std::size_t>(l)].node) +
                    (1.0 - alpha) * relations(k, l);
  const auto denom = static_cast<double>(std::max(nu.size(), nv.size()));
  return km_max_value(local) / denom;
}

}  // namespace

double neighbor_score(Eigen::Index u, Eigen::Index v, const SimilarityMatrix& L,
                      const MatchContext& ctx) {
  return neighbor_score_with(u, v, L, ctx.relation_block(u, v), ctx);
}

SimilarityMatrix iterate(const SimilarityMatrix& L0, const MatchContext& ctx,
                         std::vector<SimilarityMatrix>* snapshots) {
  const int sweeps = ctx.params().iterations;
  const double beta = ctx.params().beta;
  SimilarityMatrix L = L0;
  if (sweeps == 0 || L.size() == 0) return L;

  // The relation term is independent of L, so it is built once.
  std::vector<SimilarityMatrix> relations(static_cast<std::size_t>(L.size()));
  for (Eigen::Index v = 0; v < L.cols(); ++v)
    for (Eigen::Index u = 0; u < L.rows(); ++u)
      relations[static_cast<std::size_t>(v * L.rows() + u)] = ctx.relation_block(u, v);

  SimilarityMatrix next(L.rows(), L.cols());
  for (int it = 0; it < sweeps; ++it) {
    for (Eigen::Index v = 0; v < L.cols(); ++v)
      for (Eigen::Index u = 0; u < L.rows(); ++u) {
        const double ns =
            neighbor_score_with(u, v, L, relations[static_cast<std::size_t>(v * L.rows() + u)], ctx);
        next(u, v) = std::clamp((1.0 - beta) * L(u, v) + beta * ns, 0.0, 1.0);
      }
    L.swap(next);
    if (snapshots) snapshots->push_back(L);
  }
  return L;
}

WeightedMatch weighted_matching_score(const SimilarityMatrix& L,
                                      const ImportanceDistribution& imp1,
                                      const ImportanceDistribution& imp2) {
  if (imp1.size() != L.rows() || imp2.size() != L.cols())
    throw Error(ErrorCode::DimensionMismatch, "weighted matching: importance sizes differ from matrix");
  WeightedMatch out;
  if (L.size() == 0) return out;
  SimilarityMatrix W(L.rows(), L.cols());
  for (Eigen::Index j = 0; j < L.cols(); ++j)
    for (Eigen::Index i = 0; i < L.rows(); ++i) W(i, j) = 0.5 * (imp1[i] + imp2[j]) * L(i, j);
  out.matching = km_max_matching(W);
  out.score = std::clamp(out.matching.value, 0.0, 1.0);
  return out;
}

ScoreReport sess(const SceneGraph& g1, const SceneGraph& g2, const SimilarityProvider& provider,
                 const HyperParams& params, const SessOptions& options) {
  params.validate();
  require_valid(g1);
  require_valid(g2);

  ScoreReport report;
  MatchContext ctx(g1, g2, provider, params, graph_importance(g1, params.k, options.image1),
                   graph_importance(g2, params.k, options.image2));
  report.image_score = provider.image_similarity(g1, g2);

  const bool empty1 = g1.nodes.empty(), empty2 = g2.nodes.empty();
  if (empty1 && empty2) {
    // No objects on either side: the image term carries the whole score.
    report.graph_score = report.image_score;
    report.sess = report.image_score;
    return report;
  }
  if (empty1 || empty2) {
    report.graph_score = 0.0;
    report.sess = params.gamma * report.image_score;
    return report;
  }

  const SimilarityMatrix L0 = initial_matrix(ctx);
  const SimilarityMatrix L = iterate(L0, ctx, options.keep_snapshots ? &report.snapshots : nullptr);
  const WeightedMatch wm = weighted_matching_score(L, ctx.imp1(), ctx.imp2());
  report.graph_score = wm.score;
  report.sess = (1.0 - params.gamma) * report.graph_score + params.gamma * report.image_score;
  for (const auto& [i, j] : wm.matching.pairs) {
    report.matching.push_back({g1.nodes[static_cast<std::size_t>(i)].id,
                               g2.nodes[static_cast<std::size_t>(j)].id,
                               0.5 * (ctx.imp1()[i] + ctx.imp2()[j]), L(i, j)});
  }
  return report;
}

}  // namespace sess
