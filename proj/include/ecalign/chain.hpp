#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ecalign/lexical.hpp"
#include "ecalign/ontology.hpp"

namespace ecalign {

enum class ChainMode {
  /// Transitions weighted by label-set edge confidence.
  edge_confidence,
  /// Stock similarity flooding: a transition only for identical labels, uniform weights.
  baseline_sf,
};

enum class NormMode {
  /// Reciprocal-sum rule: T_ij = sum_k 1/w_ik - 1/w_ij.
  formula,
  /// Complement rule: T_ij = sum_k w_ik - w_ij.
  complement,
};

/// One state of the pairwise chain: a term of the left ontology paired with a
/// term of the right one. `index == left * right_size + right`.
struct PairState {
  Eigen::Index left;
  Eigen::Index right;
  Eigen::Index index;
};

template <typename Scalar>
using Distribution = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Row-stochastic tolerance used by every stochasticity check.
inline constexpr double kRowSumTolerance = 1e-9;

/// Markov chain over term pairs. Transitions are stored sparse and row-major;
/// rows never hold explicit zeros or duplicate columns.
///
/// A chain may also carry a restart distribution r with a per-row weight d:
/// the effective transition matrix is then P + d r. This keeps dangling rows
/// that jump back to a prior sparse.
template <typename Scalar>
class PairwiseChain {
 public:
  using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  PairwiseChain() = default;
  PairwiseChain(std::vector<std::string> left_ids, std::vector<std::string> right_ids,
                SparseMatrix transitions, ChainMode mode, bool stochastic,
                std::optional<Distribution<Scalar>> restart = std::nullopt,
                Vector restart_weight = Vector())
      : left_ids_(std::move(left_ids)),
        right_ids_(std::move(right_ids)),
        transitions_(std::move(transitions)),
        mode_(mode),
        stochastic_(stochastic),
        restart_(std::move(restart)),
        restart_weight_(std::move(restart_weight)) {
    const auto n = size();
    if (transitions_.rows() != n || transitions_.cols() != n) {
      throw std::invalid_argument("transition matrix does not match the number of pair states");
    }
    if (restart_weight_.size() == 0) restart_weight_.setZero(n);
    if (restart_weight_.size() != n || (restart_ && restart_->size() != n)) {
      throw std::invalid_argument("restart vector does not match the number of pair states");
    }
    if (!restart_ && (restart_weight_.array() != Scalar(0)).any()) {
      throw std::invalid_argument("restart weights given without a restart distribution");
    }
    transitions_.prune(Scalar(0));
    transitions_.makeCompressed();
  }

  Eigen::Index left_size() const { return static_cast<Eigen::Index>(left_ids_.size()); }
  Eigen::Index right_size() const { return static_cast<Eigen::Index>(right_ids_.size()); }
  Eigen::Index size() const { return left_size() * right_size(); }

  const std::vector<std::string>& left_ids() const { return left_ids_; }
  const std::vector<std::string>& right_ids() const { return right_ids_; }

  Eigen::Index state_index(Eigen::Index left, Eigen::Index right) const {
    return left * right_size() + right;
  }
  PairState state(Eigen::Index index) const {
    return {index / right_size(), index % right_size(), index};
  }
  std::vector<PairState> states() const {
    std::vector<PairState> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (Eigen::Index i = 0; i < size(); ++i) out.push_back(state(i));
    return out;
  }

  /// Sparse part of the transition matrix.
  const SparseMatrix& transitions() const { return transitions_; }
  const std::optional<Distribution<Scalar>>& restart() const { return restart_; }
  const Vector& restart_weight() const { return restart_weight_; }
  bool has_restart() const { return restart_ && (restart_weight_.array() != Scalar(0)).any(); }

  /// Effective transition matrix, restart term included.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> p = transitions_;
    if (restart_) p.noalias() += restart_weight_ * *restart_;
    return p;
  }

  /// pi * (P + d r) without materializing the restart term.
  Distribution<Scalar> step(const Distribution<Scalar>& pi) const {
    Distribution<Scalar> next = pi * transitions_;
    if (restart_) next += pi.dot(restart_weight_.transpose()) * *restart_;
    return next;
  }

  ChainMode mode() const { return mode_; }
  bool stochastic() const { return stochastic_; }

 private:
  std::vector<std::string> left_ids_;
  std::vector<std::string> right_ids_;
  SparseMatrix transitions_;
  ChainMode mode_ = ChainMode::edge_confidence;
  bool stochastic_ = false;
  std::optional<Distribution<Scalar>> restart_;
  Vector restart_weight_;
};

/// Wraps a square matrix as a chain whose states are (i, 0) pairs. Used for
/// chains that do not come from ontologies.
template <typename Derived>
PairwiseChain<typename Derived::Scalar> chain_from_matrix(const Eigen::MatrixBase<Derived>& m,
                                                          bool stochastic) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw std::invalid_argument("transition matrix must be square");
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < m.rows(); ++i) ids.push_back(std::to_string(i));
  typename PairwiseChain<Scalar>::SparseMatrix sparse = m.sparseView();
  return {std::move(ids), {"0"}, std::move(sparse), ChainMode::edge_confidence, stochastic};
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row_sums(const PairwiseChain<Scalar>& chain) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sums =
      chain.transitions() * Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(chain.size());
  if (chain.restart()) sums += chain.restart_weight() * chain.restart()->sum();
  return sums;
}

template <typename Scalar>
bool is_row_stochastic(const PairwiseChain<Scalar>& chain, double tolerance = kRowSumTolerance) {
  if (chain.size() == 0) return true;
  const auto sums = row_sums(chain);
  return ((sums.array() - Scalar(1)).abs() <= Scalar(tolerance)).all();
}

namespace detail {

// Interns the normalized labels of one ontology so label distances can be tabulated once.
struct LabelIndex {
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::string> labels;
  // Per term: target index -> ids of the normalized labels on edges to it.
  std::vector<std::vector<std::pair<Eigen::Index, std::vector<std::size_t>>>> successors;

  LabelIndex(const OntologyGraph& g, LabelNorm norm) {
    successors.resize(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (const auto& [target, label_set] : g.successors(x)) {
        std::vector<std::size_t> label_ids;
        for (const auto& raw : label_set) {
          auto normalized = normalize_label(raw, norm);
          auto [it, inserted] = ids.emplace(normalized, labels.size());
          if (inserted) labels.push_back(std::move(normalized));
          label_ids.push_back(it->second);
        }
        successors[x].emplace_back(static_cast<Eigen::Index>(target), std::move(label_ids));
      }
    }
  }
};

}  // namespace detail

/// Unnormalized pairwise chain. State (x, y) moves to (x', y') when g1 has an
/// edge x -> x' and g2 has an edge y -> y'. The weight is the label-set edge
/// confidence of the two label sets (edge-confidence mode), or 1 when they share
/// an identical normalized label (baseline mode). Zero weights are not stored.
template <typename Scalar = double>
PairwiseChain<Scalar> build_upmc(const OntologyGraph& g1, const OntologyGraph& g2,
                                 const SimilarityConfig& cfg, ChainMode mode) {
  cfg.validate();
  if (g1.empty() || g2.empty()) throw std::invalid_argument("both ontologies must have terms");

  const detail::LabelIndex left(g1, cfg.label_norm), right(g2, cfg.label_norm);
  Eigen::MatrixXi distance(static_cast<Eigen::Index>(left.labels.size()),
                           static_cast<Eigen::Index>(right.labels.size()));
  for (std::size_t a = 0; a < left.labels.size(); ++a) {
    for (std::size_t b = 0; b < right.labels.size(); ++b) {
      distance(a, b) = static_cast<int>(levenshtein(left.labels[a], right.labels[b]));
    }
  }

  auto weight = [&](const std::vector<std::size_t>& la, const std::vector<std::size_t>& lb) {
    int best = -1;
    for (const auto a : la) {
      for (const auto b : lb) {
        const int d = distance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (best < 0 || d < best) best = d;
      }
    }
    if (mode == ChainMode::baseline_sf) return best == 0 ? Scalar(1) : Scalar(0);
    return confidence_from_similarity(
        similarity_from_distance<Scalar>(static_cast<std::size_t>(best)), cfg.gamma);
  };

  std::vector<std::string> left_ids, right_ids;
  for (const auto& t : g1.terms()) left_ids.push_back(t.id);
  for (const auto& t : g2.terms()) right_ids.push_back(t.id);
  const auto n1 = static_cast<Eigen::Index>(g1.size());
  const auto n2 = static_cast<Eigen::Index>(g2.size());

  std::vector<Eigen::Triplet<Scalar>> triplets;
  for (Eigen::Index x = 0; x < n1; ++x) {
    for (Eigen::Index y = 0; y < n2; ++y) {
      for (const auto& [xt, lx] : left.successors[static_cast<std::size_t>(x)]) {
        for (const auto& [yt, ly] : right.successors[static_cast<std::size_t>(y)]) {
          const Scalar w = weight(lx, ly);
          if (w > Scalar(0)) triplets.emplace_back(x * n2 + y, xt * n2 + yt, w);
        }
      }
    }
  }
  typename PairwiseChain<Scalar>::SparseMatrix p(n1 * n2, n1 * n2);
  p.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(left_ids), std::move(right_ids), std::move(p), mode, false};
}

/// Row-normalizes an unnormalized chain into a row-stochastic one.
///
/// Edge-confidence chains treat each stored weight as a dissimilarity and use
/// `norm` to turn a row into probabilities. Baseline chains always get uniform
/// weights 1/outdegree. A row with one entry gets weight 1 on it. An empty row
/// becomes a self-loop of weight 1, or, when `restart` is given, jumps to the
/// `restart` distribution.
template <typename Scalar>
PairwiseChain<Scalar> normalize(const PairwiseChain<Scalar>& chain, NormMode norm,
                                const std::optional<Distribution<Scalar>>& restart = std::nullopt) {
  if (chain.stochastic()) throw std::invalid_argument("chain is already row-stochastic");
  std::optional<Distribution<Scalar>> jump;
  typename PairwiseChain<Scalar>::Vector jump_weight = PairwiseChain<Scalar>::Vector::Zero(chain.size());
  if (restart) {
    if (restart->size() != chain.size() || (restart->array() < Scalar(0)).any() ||
        !(restart->sum() > Scalar(0))) {
      throw std::invalid_argument("restart must be a non-negative vector over the pair states");
    }
    jump = *restart / restart->sum();
  }
  const auto& p = chain.transitions();
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(static_cast<std::size_t>(p.nonZeros() + chain.size()));
  std::vector<std::pair<Eigen::Index, Scalar>> row;

  for (Eigen::Index i = 0; i < p.outerSize(); ++i) {
    row.clear();
    for (typename PairwiseChain<Scalar>::SparseMatrix::InnerIterator it(p, i); it; ++it) {
      if (it.value() < Scalar(0)) {
        throw std::invalid_argument("negative transition weight in row " + std::to_string(i));
      }
      if (it.value() > Scalar(0)) row.emplace_back(it.col(), it.value());
    }
    if (row.empty()) {
      if (jump) {
        jump_weight(i) = Scalar(1);
      } else {
        triplets.emplace_back(i, i, Scalar(1));
      }
      continue;
    }
    if (row.size() == 1) {
      triplets.emplace_back(i, row.front().first, Scalar(1));
      continue;
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(static_cast<Eigen::Index>(row.size()));
    for (std::size_t k = 0; k < row.size(); ++k) w(static_cast<Eigen::Index>(k)) = row[k].second;

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> t;
    if (chain.mode() == ChainMode::baseline_sf) {
      t.setOnes(w.size());
    } else if (norm == NormMode::formula) {
      const auto reciprocal = w.cwiseInverse();
      t = (-reciprocal).array() + reciprocal.sum();
    } else {
      t = (-w).array() + w.sum();
    }
    const Scalar total = t.sum();
    for (std::size_t k = 0; k < row.size(); ++k) {
      triplets.emplace_back(i, row[k].first, t(static_cast<Eigen::Index>(k)) / total);
    }
  }
  typename PairwiseChain<Scalar>::SparseMatrix out(p.rows(), p.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  if (!jump) return {chain.left_ids(), chain.right_ids(), std::move(out), chain.mode(), true};
  return {chain.left_ids(), chain.right_ids(), std::move(out), chain.mode(), true,
          std::move(jump), std::move(jump_weight)};
}

/// P' = a P + (1 - a) I. Keeps P row-stochastic, makes every state aperiodic,
/// and leaves the stationary distribution of an irreducible P unchanged.
template <typename Scalar>
PairwiseChain<Scalar> ergodic_transform(const PairwiseChain<Scalar>& chain, double a) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::invalid_argument("damping must lie in (0, 1], got " + std::to_string(a));
  }
  if (!chain.stochastic()) throw std::invalid_argument("ergodic transform needs a stochastic chain");
  if (a == 1.0) return chain;

  const auto& p = chain.transitions();
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(static_cast<std::size_t>(p.nonZeros() + chain.size()));
  const Scalar scale(a), stay(1.0 - a);
  for (Eigen::Index i = 0; i < p.outerSize(); ++i) {
    Scalar diagonal = stay;
    for (typename PairwiseChain<Scalar>::SparseMatrix::InnerIterator it(p, i); it; ++it) {
      if (it.col() == i) {
        diagonal += scale * it.value();
      } else {
        triplets.emplace_back(i, it.col(), scale * it.value());
      }
    }
    triplets.emplace_back(i, i, diagonal);
  }
  typename PairwiseChain<Scalar>::SparseMatrix out(p.rows(), p.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return {chain.left_ids(), chain.right_ids(), std::move(out), chain.mode(), true,
          chain.restart(), scale * chain.restart_weight()};
}

/// P' = a P + (1 - a) 1 r: with probability 1 - a every state jumps to the
/// restart distribution r. Rows that already jump to r (see normalize) keep
/// doing so with weight a. The result is irreducible on the support of r.
template <typename Scalar>
PairwiseChain<Scalar> restart_transform(const PairwiseChain<Scalar>& chain, double a,
                                        const Distribution<Scalar>& restart) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::invalid_argument("damping must lie in (0, 1], got " + std::to_string(a));
  }
  if (!chain.stochastic()) throw std::invalid_argument("restart transform needs a stochastic chain");
  if (restart.size() != chain.size() || (restart.array() < Scalar(0)).any() || !(restart.sum() > Scalar(0))) {
    throw std::invalid_argument("restart must be a non-negative vector over the pair states");
  }
  const Distribution<Scalar> r = restart / restart.sum();
  if (chain.has_restart() && !chain.restart()->isApprox(r)) {
    throw std::invalid_argument("chain already restarts to a different distribution");
  }
  const Scalar scale(a);
  typename PairwiseChain<Scalar>::SparseMatrix p = scale * chain.transitions();
  typename PairwiseChain<Scalar>::Vector weight = scale * chain.restart_weight();
  weight.array() += Scalar(1) - scale;
  return {chain.left_ids(), chain.right_ids(), std::move(p), chain.mode(), true, r, std::move(weight)};
}

/// Starting distribution from lexical term similarity: state (x, y) gets the
/// edit similarity of the normalized labels, then the vector is L1-normalized.
template <typename Scalar>
Distribution<Scalar> initial_distribution(const PairwiseChain<Scalar>& chain,
                                          const OntologyGraph& g1, const OntologyGraph& g2,
                                          const SimilarityConfig& cfg) {
  if (chain.left_size() != static_cast<Eigen::Index>(g1.size()) ||
      chain.right_size() != static_cast<Eigen::Index>(g2.size())) {
    throw std::invalid_argument("chain states do not enumerate g1 x g2");
  }
  std::vector<std::string> right_labels;
  for (const auto& t : g2.terms()) right_labels.push_back(normalize_label(t.label, cfg.label_norm));

  Distribution<Scalar> pi(chain.size());
  for (Eigen::Index x = 0; x < chain.left_size(); ++x) {
    const auto left = normalize_label(g1.term(static_cast<std::size_t>(x)).label, cfg.label_norm);
    for (Eigen::Index y = 0; y < chain.right_size(); ++y) {
      pi(chain.state_index(x, y)) =
          edit_similarity<Scalar>(left, right_labels[static_cast<std::size_t>(y)]);
    }
  }
  const Scalar total = pi.sum();
  if (!(total > Scalar(0))) return Distribution<Scalar>::Constant(chain.size(), Scalar(1) / Scalar(chain.size()));
  return pi / total;
}

}  // namespace ecalign
