#pragma once

// Maximum-weight bipartite matching (Kuhn-Munkres) on rectangular
// nonnegative matrices, with an exhaustive oracle for testing.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sess/error.hpp"

namespace sess {

template <typename Scalar>
struct Matching {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  Scalar value = 0;
};

namespace detail {

template <typename Derived>
void check_assignment_input(const Eigen::MatrixBase<Derived>& w) {
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      const auto v = w(i, j);
      if (!std::isfinite(static_cast<double>(v)))
        throw Error(ErrorCode::NonFiniteEntry, "assignment: matrix entry is not finite");
      if (v < 0) throw Error(ErrorCode::NegativeEntry, "assignment: matrix entry is negative");
    }
}

/// Potential-based Hungarian method on the zero-padded square matrix.
/// Returns the column assigned to each row (or -1 for padding).
template <typename Scalar, typename Derived>
std::vector<Eigen::Index> hungarian_rows(const Eigen::MatrixBase<Derived>& w) {
  const Eigen::Index n = w.rows(), m = w.cols();
  const Eigen::Index N = std::max(n, m);
  std::vector<Eigen::Index> row_to_col(static_cast<std::size_t>(n), -1);
  if (n == 0 || m == 0) return row_to_col;

  auto cost = [&](Eigen::Index i, Eigen::Index j) -> Scalar {
    return (i < n && j < m) ? -static_cast<Scalar>(w(i, j)) : Scalar(0);
  };
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> u(N + 1, 0), v(N + 1, 0);
  std::vector<Eigen::Index> p(N + 1, 0), way(N + 1, 0);
  std::vector<Scalar> minv(N + 1);
  std::vector<char> used(N + 1);

  for (Eigen::Index i = 1; i <= N; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = p[j0];
      Eigen::Index j1 = 0;
      Scalar delta = inf;
      for (Eigen::Index j = 1; j <= N; ++j) {
        if (used[j]) continue;
        const Scalar cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= N; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (Eigen::Index j = 1; j <= N; ++j)
    if (p[j] - 1 < n && j - 1 < m) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

template <typename Scalar, typename Derived>
Scalar hungarian_value(const Eigen::MatrixBase<Derived>& w) {
  const auto rows = hungarian_rows<Scalar>(w);
  Scalar total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i] >= 0) total += static_cast<Scalar>(w(static_cast<Eigen::Index>(i), rows[i]));
  return total;
}

template <typename Scalar>
Scalar tie_tolerance(Scalar target) {
  return Scalar(1e-11) * (Scalar(1) + std::abs(target));
}

}  // namespace detail

/// Optimal value only; cheaper than km_max_matching when pairs are not needed.
template <typename Derived>
typename Derived::Scalar km_max_value(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  detail::check_assignment_input(w);
  return detail::hungarian_value<Scalar>(w);
}

/// Maximum-weight matching. Among optimal matchings of cardinality
/// min(n, m), returns the lexicographically smallest row-sorted pair list.
template <typename Derived>
Matching<typename Derived::Scalar> km_max_matching(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::check_assignment_input(w);

  const Eigen::Index n = w.rows(), m = w.cols();
  Matching<Scalar> out;
  if (n == 0 || m == 0) return out;

  const Mat full = w;
  const Scalar best = detail::hungarian_value<Scalar>(full);

  // Fix rows in order, taking the smallest column that still admits an
  // optimal completion.
  std::vector<Eigen::Index> free_cols(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) free_cols[j] = j;
  Scalar collected = 0;
  Eigen::Index needed = std::min(n, m);

  auto completion = [&](Eigen::Index first_row, const std::vector<Eigen::Index>& cols) {
    const Eigen::Index rows = n - first_row;
    if (rows <= 0 || cols.empty()) return Scalar(0);
    Mat sub(rows, static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index c = 0; c < sub.cols(); ++c)
      sub.col(c) = full.col(cols[c]).tail(rows);
    return detail::hungarian_value<Scalar>(sub);
  };

  for (Eigen::Index i = 0; i < n && needed > 0; ++i) {
    const Scalar target = best - collected;
    const Scalar tol = detail::tie_tolerance(best);
    for (std::size_t c = 0; c < free_cols.size(); ++c) {
      std::vector<Eigen::Index> rest = free_cols;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(c));
      const Scalar cand = full(i, free_cols[c]) + completion(i + 1, rest);
      if (cand >= target - tol) {
        out.pairs.emplace_back(i, free_cols[c]);
        collected += full(i, free_cols[c]);
        free_cols = std::move(rest);
        --needed;
        break;
      }
    }
    // No column fits: skipping row i is optimal, which only happens when
    // the remaining rows can still fill every free column.
  }

  for (const auto& [r, c] : out.pairs) out.value += full(r, c);
  return out;
}

/// Exhaustive enumeration of injections; oracle for km_max_matching.
/// Throws TooLarge when min(n, m) > 8.
template <typename Derived>
Matching<typename Derived::Scalar> brute_force_matching(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  detail::check_assignment_input(w);
  const Eigen::Index n = w.rows(), m = w.cols();
  if (std::min(n, m) > 8)
    throw Error(ErrorCode::TooLarge, "brute_force_matching: min(n, m) exceeds 8");

  Matching<Scalar> best;
  if (n == 0 || m == 0) return best;
  bool have_best = false;
  const Eigen::Index target_size = std::min(n, m);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> current;
  std::vector<char> col_used(static_cast<std::size_t>(m), 0);

  // Rows visited in order and columns ascending, so the first optimum found
  // is the lexicographically smallest.
  auto recurse = [&](auto&& self, Eigen::Index row, Scalar sum) -> void {
    const auto have = static_cast<Eigen::Index>(current.size());
    if (have == target_size) {
      if (!have_best || sum > best.value + detail::tie_tolerance(best.value)) {
        best.pairs = current;
        best.value = sum;
        have_best = true;
      }
      return;
    }
    if (row >= n) return;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (col_used[c]) continue;
      col_used[c] = 1;
      current.emplace_back(row, c);
      self(self, row + 1, sum + static_cast<Scalar>(w(row, c)));
      current.pop_back();
      col_used[c] = 0;
    }
    if (n - row - 1 >= target_size - have) self(self, row + 1, sum);
  };
  recurse(recurse, 0, Scalar(0));

  best.value = 0;
  for (const auto& [r, c] : best.pairs) best.value += static_cast<Scalar>(w(r, c));
  return best;
}

}  // namespace sess
