#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecalign/chain.hpp"

namespace ecalign {

template <typename Scalar>
using ScoreMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Assignment = std::vector<std::pair<Eigen::Index, Eigen::Index>>;

struct Correspondence {
  std::string source;
  std::string target;
  double confidence = 0.0;
};

/// How an alignment was produced. Absent for alignments read from plain TSV.
struct AlignmentMetadata {
  double gamma = 0.0;
  std::string label_norm;
  std::string method;
  std::string norm_mode;
  std::string chain_mode;
  double damping = 0.0;
  std::string damping_mode;
  std::size_t iterations = 0;
  bool converged = false;
};

/// One-to-one set of correspondences with confidences in [0, 1].
struct Alignment {
  std::vector<Correspondence> correspondences;
  std::optional<AlignmentMetadata> metadata;
};

/// Lays a pair-state distribution out as an m x n matrix and divides by the
/// largest entry so the best pair scores 1.
template <typename Scalar>
ScoreMatrix<Scalar> to_matrix(const Distribution<Scalar>& dist, std::span<const PairState> states) {
  if (states.empty() || dist.size() != static_cast<Eigen::Index>(states.size())) {
    throw std::invalid_argument("distribution length does not match the pair states");
  }
  Eigen::Index rows = 0, cols = 0;
  for (const auto& s : states) {
    rows = std::max(rows, s.left + 1);
    cols = std::max(cols, s.right + 1);
  }
  if (rows * cols != dist.size()) throw std::invalid_argument("pair states do not form an m x n grid");
  const Scalar peak = dist.maxCoeff();
  if (!(peak > Scalar(0))) throw std::invalid_argument("distribution is all zero");

  ScoreMatrix<Scalar> m(rows, cols);
  for (const auto& s : states) m(s.left, s.right) = dist(s.index) / peak;
  return m;
}

namespace detail {

// Kuhn-Munkres with potentials for a square minimum-cost problem. Returns the
// column of every row, and the row/column potentials, which satisfy
// u_i + v_j <= cost_ij with equality on every optimal assignment's edges.
template <typename Scalar>
std::vector<Eigen::Index> min_cost_assignment(const ScoreMatrix<Scalar>& cost,
                                              Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u,
                                              Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  const Eigen::Index n = cost.rows();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  // 1-based internal indexing; column 0 is a virtual free column.
  u.setZero(n + 1);
  v.setZero(n + 1);
  std::vector<Eigen::Index> row_of(static_cast<std::size_t>(n + 1), 0), way(row_of.size(), 0);
  std::vector<Scalar> min_slack(row_of.size());
  std::vector<bool> used(row_of.size());
  for (Eigen::Index i = 1; i <= n; ++i) {
    row_of[0] = i;
    Eigen::Index col = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[static_cast<std::size_t>(col)] = true;
      const Eigen::Index row = row_of[static_cast<std::size_t>(col)];
      Scalar delta = inf;
      Eigen::Index next = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) continue;
        const Scalar slack = cost(row - 1, j - 1) - u(row) - v(j);
        if (slack < min_slack[js]) {
          min_slack[js] = slack;
          way[js] = col;
        }
        if (min_slack[js] < delta) {
          delta = min_slack[js];
          next = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) {
          u(row_of[js]) += delta;
          v(j) -= delta;
        } else {
          min_slack[js] -= delta;
        }
      }
      col = next;
    } while (row_of[static_cast<std::size_t>(col)] != 0);
    do {
      const Eigen::Index prev = way[static_cast<std::size_t>(col)];
      row_of[static_cast<std::size_t>(col)] = row_of[static_cast<std::size_t>(prev)];
      col = prev;
    } while (col != 0);
  }
  std::vector<Eigen::Index> col_of(static_cast<std::size_t>(n));
  for (Eigen::Index j = 1; j <= n; ++j) {
    col_of[static_cast<std::size_t>(row_of[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  return col_of;
}

// Tries to re-route column `target` away from its current row using only
// allowed edges and rows >= `first_free_row`; Kuhn-style alternating search.
inline bool reroute(Eigen::Index row, const std::vector<std::vector<Eigen::Index>>& allowed,
                    std::vector<Eigen::Index>& col_of, std::vector<Eigen::Index>& row_of,
                    std::vector<bool>& seen, Eigen::Index first_free_row,
                    Eigen::Index forbidden_col) {
  for (const auto col : allowed[static_cast<std::size_t>(row)]) {
    const auto cs = static_cast<std::size_t>(col);
    if (seen[cs] || col == forbidden_col) continue;
    seen[cs] = true;
    const Eigen::Index holder = row_of[cs];
    if (holder >= 0 && holder < first_free_row) continue;
    if (holder < 0 ||
        reroute(holder, allowed, col_of, row_of, seen, first_free_row, forbidden_col)) {
      col_of[static_cast<std::size_t>(row)] = col;
      row_of[cs] = row;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Maximum-weight assignment of min(m, n) pairs. Rectangular inputs are padded
/// with zero rows or columns; padding pairs are dropped from the result. Among
/// optimal assignments (entries within 1e-9 relative of tight) the
/// lexicographically smallest one, by row then column, is returned. Pairs are
/// sorted by row.
template <typename Derived>
Assignment hungarian_max(const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = weights.rows(), n = weights.cols();
  if (m == 0 || n == 0) throw std::invalid_argument("cannot match an empty matrix");
  if ((weights.array() < Scalar(0)).any()) {
    throw std::invalid_argument("matching weights must be non-negative");
  }
  const Eigen::Index size = std::max(m, n);
  ScoreMatrix<Scalar> padded = ScoreMatrix<Scalar>::Zero(size, size);
  padded.topLeftCorner(m, n) = weights;
  const Scalar peak = padded.maxCoeff();
  const ScoreMatrix<Scalar> cost = (peak - padded.array()).matrix();

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u, v;
  std::vector<Eigen::Index> col_of = detail::min_cost_assignment<Scalar>(cost, u, v);

  // Every optimal assignment lives on the tight edges of the optimal duals.
  const Scalar tolerance = Scalar(1e-9) * std::max(Scalar(1), peak);
  std::vector<std::vector<Eigen::Index>> allowed(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      if (cost(i, j) - u(i + 1) - v(j + 1) <= tolerance) allowed[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  std::vector<Eigen::Index> row_of(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) row_of[static_cast<std::size_t>(col_of[static_cast<std::size_t>(i)])] = i;

  // Fix rows in order, each to the smallest tight column that still leaves a
  // perfect tight matching for the rows after it.
  std::vector<bool> seen(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) {
    for (const auto col : allowed[static_cast<std::size_t>(i)]) {
      const auto cs = static_cast<std::size_t>(col);
      const Eigen::Index current = col_of[static_cast<std::size_t>(i)];
      if (col == current) break;
      const Eigen::Index holder = row_of[cs];
      if (holder < i) continue;
      // Move `col` to row i; its holder must find another column, possibly `current`.
      auto trial_col = col_of;
      auto trial_row = row_of;
      trial_row[static_cast<std::size_t>(current)] = -1;
      trial_col[static_cast<std::size_t>(i)] = col;
      trial_row[cs] = i;
      std::fill(seen.begin(), seen.end(), false);
      seen[cs] = true;
      if (detail::reroute(holder, allowed, trial_col, trial_row, seen, i + 1, -1)) {
        col_of = std::move(trial_col);
        row_of = std::move(trial_row);
        break;
      }
    }
  }

  Assignment out;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j = col_of[static_cast<std::size_t>(i)];
    if (j < n) out.emplace_back(i, j);
  }
  return out;
}

/// Refines a stationary distribution into a one-to-one alignment. Pairs whose
/// rescaled score is below `min_confidence` are dropped.
template <typename Scalar>
Alignment refine(const Distribution<Scalar>& dist, const PairwiseChain<Scalar>& chain,
                 double min_confidence = 0.0) {
  const auto states = chain.states();
  const ScoreMatrix<Scalar> scores = to_matrix<Scalar>(dist, states);
  Alignment alignment;
  for (const auto& [row, col] : hungarian_max(scores)) {
    const double confidence = std::clamp(static_cast<double>(scores(row, col)), 0.0, 1.0);
    if (confidence < min_confidence) continue;
    alignment.correspondences.push_back({chain.left_ids()[static_cast<std::size_t>(row)],
                                         chain.right_ids()[static_cast<std::size_t>(col)],
                                         confidence});
  }
  return alignment;
}

std::string to_json(const Alignment& alignment);
std::string to_tsv(const Alignment& alignment);
/// Accepts the JSON alignment format or TSV `source<TAB>target[<TAB>confidence]`.
Alignment parse_alignment(std::string_view text);

/// Shortest decimal text that round-trips, independent of locale.
std::string format_number(double value);

}  // namespace ecalign
