#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "sess/assignment.hpp"
#include "sess/random.hpp"

using namespace sess;
using Pairs = std::vector<std::pair<Eigen::Index, Eigen::Index>>;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index n, Eigen::Index m) {
  Eigen::MatrixXd w(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) w(i, j) = rng.uniform();
  return w;
}

}  // namespace

TEST_CASE("km on the 2x2 identity") {
  const auto r = km_max_matching(Eigen::Matrix2d::Identity());
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.pairs == Pairs{{0, 0}, {1, 1}});
}

TEST_CASE("km picks the better of two permutations") {
  Eigen::MatrixXd w(2, 2);
  w << 0.9, 0.1, 0.8, 0.7;
  const auto r = km_max_matching(w);
  CHECK(r.value == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(r.pairs == Pairs{{0, 0}, {1, 1}});
}

TEST_CASE("km on a tall 3x2 matrix") {
  Eigen::MatrixXd w(3, 2);
  w << 0.5, 0.2, 0.4, 0.9, 0.3, 0.1;
  const auto r = km_max_matching(w);
  CHECK(r.value == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(r.pairs == Pairs{{0, 0}, {1, 1}});
  CHECK(brute_force_matching(w).value == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("empty and single-entry matrices") {
  CHECK(km_max_matching(Eigen::MatrixXd(0, 4)).value == 0.0);
  CHECK(km_max_matching(Eigen::MatrixXd(0, 4)).pairs.empty());
  CHECK(brute_force_matching(Eigen::MatrixXd(0, 3)).pairs.empty());
  Eigen::MatrixXd one(1, 1);
  one << 0.37;
  CHECK(brute_force_matching(one).value == 0.37);
  CHECK(km_max_matching(one).value == 0.37);
}

TEST_CASE("input checks") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(2, 2, 0.5);
  w(1, 0) = -0.1;
  CHECK_THROWS_WITH_AS(km_max_matching(w), doctest::Contains("negative"), Error);
  w(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(km_max_value(w), doctest::Contains("not finite"), Error);
  CHECK_THROWS_AS(brute_force_matching(Eigen::MatrixXd::Zero(9, 9)), Error);
  CHECK_NOTHROW(brute_force_matching(Eigen::MatrixXd::Zero(9, 2)));
}

TEST_CASE("ties resolve to the lexicographically smallest pair list") {
  const auto all_equal = km_max_matching(Eigen::MatrixXd::Constant(3, 3, 0.5));
  CHECK(all_equal.pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
  const auto zeros = km_max_matching(Eigen::MatrixXd::Zero(2, 3));
  CHECK(zeros.pairs == Pairs{{0, 0}, {1, 1}});
  // Rows 0 and 2 tie for the only column; row 0 wins.
  Eigen::MatrixXd tall(3, 1);
  tall << 0.4, 0.1, 0.4;
  CHECK(km_max_matching(tall).pairs == Pairs{{0, 0}});
  // Optimum needs row 0 skipped.
  Eigen::MatrixXd skip(3, 1);
  skip << 0.1, 0.9, 0.2;
  CHECK(km_max_matching(skip).pairs == Pairs{{1, 0}});
}

TEST_CASE("km matches the brute-force oracle including pair lists") {
  Rng rng(2024);
  for (int t = 0; t < 300; ++t) {
    const auto n = rng.integer(0, 6), m = rng.integer(0, 6);
    Eigen::MatrixXd w = random_matrix(rng, n, m);
    // Quantize some matrices so ties actually occur.
    if (t % 3 == 0) w = (w * 3).array().round() / 3;
    const auto km = km_max_matching(w);
    const auto bf = brute_force_matching(w);
    CHECK(std::abs(km.value - bf.value) < 1e-9);
    CHECK(km.pairs == bf.pairs);
    CHECK(static_cast<Eigen::Index>(km.pairs.size()) == std::min(n, m));
  }
}

TEST_CASE("matching properties") {
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto n = rng.integer(1, 7), m = rng.integer(1, 7);
    const Eigen::MatrixXd w = random_matrix(rng, n, m);
    const double v = km_max_value(w);

    SUBCASE("transpose") { CHECK(std::abs(km_max_value(Eigen::MatrixXd(w.transpose())) - v) < 1e-9); }

    SUBCASE("monotone in a single entry") {
      Eigen::MatrixXd up = w;
      up(rng.integer(0, n - 1), rng.integer(0, m - 1)) += rng.uniform();
      CHECK(km_max_value(up) >= v - 1e-12);
    }

    SUBCASE("row and column permutation") {
      std::vector<Eigen::Index> rp(static_cast<std::size_t>(n)), cp(static_cast<std::size_t>(m));
      std::iota(rp.begin(), rp.end(), 0);
      std::iota(cp.begin(), cp.end(), 0);
      std::reverse(rp.begin(), rp.end());
      std::rotate(cp.begin(), cp.begin() + 1, cp.end());
      Eigen::MatrixXd p(n, m);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) p(i, j) = w(rp[i], cp[j]);
      CHECK(std::abs(km_max_value(p) - v) < 1e-9);
    }

    SUBCASE("positive scaling") {
      const double c = rng.uniform(0.1, 10);
      CHECK(std::abs(km_max_value(Eigen::MatrixXd(c * w)) - c * v) < 1e-9 * (1 + c));
    }

    SUBCASE("injective pairs realize the value") {
      const auto r = km_max_matching(w);
      std::vector<int> rows(static_cast<std::size_t>(n)), cols(static_cast<std::size_t>(m));
      double sum = 0;
      for (const auto& [i, j] : r.pairs) {
        CHECK(++rows[i] == 1);
        CHECK(++cols[j] == 1);
        sum += w(i, j);
      }
      CHECK(sum == doctest::Approx(r.value).epsilon(1e-12));
      CHECK(std::abs(r.value - v) < 1e-9);
    }
  }
}

TEST_CASE("km works with float matrices") {
  Eigen::MatrixXf w(2, 2);
  w << 0.9f, 0.1f, 0.8f, 0.7f;
  CHECK(km_max_matching(w).value == doctest::Approx(1.6f));
}
