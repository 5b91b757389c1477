#include <cmath>

#include "doctest.h"
#include "sess/providers.hpp"

using namespace sess;

TEST_CASE("clip_score closed forms") {
  Eigen::Vector2d e1(1, 0), e2(0, 1), diag(std::sqrt(2.0) / 2, std::sqrt(2.0) / 2);
  CHECK(clip_score(e1, e1) == doctest::Approx(1.0));
  CHECK(clip_score(e1, e2) == 0.0);
  CHECK(clip_score(e1, diag) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(clip_score(e1, Eigen::Vector2d(-1, 0)) == 0.0);
  CHECK_THROWS_AS(clip_score(Eigen::VectorXd(e1), Eigen::VectorXd(Eigen::Vector3d(1, 0, 0))), Error);
  CHECK_THROWS_AS(clip_score(e1, Eigen::Vector2d::Zero()), Error);
}

TEST_CASE("node similarity is the clamped cosine of node embeddings") {
  GraphNode a, b;
  a.embedding = Eigen::Vector2d(1, 0);
  b.embedding = Eigen::Vector2d(0.6, 0.8);
  const SimilarityProvider p;
  CHECK(std::abs(p.node_similarity(a, b) - 0.6) < 1e-9);
  CHECK(p.node_similarity(a, a) == doctest::Approx(1.0));
  b.embedding = Eigen::Vector2d(0, 3);
  CHECK(p.node_similarity(a, b) == 0.0);
}

TEST_CASE("relation similarity lookup and fallback") {
  SimilarityMatrix m(2, 2);
  m << 1.0, 0.8, 0.8, 1.0;
  const SimilarityProvider p(RelationSimilarityTable({"eating", "drinking"}, m));
  CHECK(p.relation_similarity("on", "on") == 1.0);
  CHECK(p.relation_similarity("eating", "drinking") == 0.8);
  CHECK(p.relation_similarity("drinking", "eating") == 0.8);
  CHECK(p.relation_similarity("zzz-unknown-1", "zzz-unknown-2") == 0.5);
  CHECK(p.relation_similarity("eating", "zzz-unknown") == 0.5);
}

TEST_CASE("psg vocabulary has 56 distinct labels") {
  auto labels = psg_relation_labels();
  CHECK(labels.size() == 56);
  std::sort(labels.begin(), labels.end());
  CHECK(std::adjacent_find(labels.begin(), labels.end()) == labels.end());
}

TEST_CASE("mock provider is deterministic and seed dependent") {
  const auto a = mock_provider(5, 16), b = mock_provider(5, 16), c = mock_provider(6, 16);
  const auto& table = a.provider().relation_table();
  CHECK(table.labels().size() == 56);
  CHECK(table.matrix().isApprox(table.matrix().transpose(), 0.0));
  CHECK(table.matrix().diagonal().isOnes());
  CHECK(table.matrix().minCoeff() >= 0.0);
  CHECK(table.matrix().maxCoeff() <= 1.0);

  bool any_diff = false;
  const auto& labels = psg_relation_labels();
  for (int i = 0; i < 100; ++i) {
    const auto& r1 = labels[static_cast<std::size_t>(i % 56)];
    const auto& r2 = labels[static_cast<std::size_t>((i * 7 + 3) % 56)];
    CHECK(a.provider().relation_similarity(r1, r2) == b.provider().relation_similarity(r1, r2));
    any_diff = any_diff || a.provider().relation_similarity(r1, r2) != c.provider().relation_similarity(r1, r2);
    CHECK((a.embedding(static_cast<std::uint64_t>(i)) == b.embedding(static_cast<std::uint64_t>(i))));
  }
  CHECK(any_diff);
  CHECK_FALSE((a.embedding(1) == c.embedding(1)));
  CHECK(a.embedding(1).size() == 16);
  CHECK_THROWS_AS(mock_provider(1, 1), Error);
}
