#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecalign/chain.hpp"

namespace ecalign {

/// Numerical failure of a stationary solve. Maps to CLI exit status 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolveMethod { iterative, steady_state };

/// How the pipeline mixes the chain before solving. `lazy` is
/// P' = aP + (1 - a)I with self-loops on dangling rows; `restart` sends
/// dangling rows and the 1 - a share of every row to the start distribution.
enum class DampingMode { restart, lazy };

struct SolverConfig {
  /// Max-norm stopping tolerance between successive iterates.
  double epsilon = 1e-9;
  std::size_t max_iters = 10000;
  /// The a of either damping mode.
  double damping = 0.85;
  DampingMode damping_mode = DampingMode::restart;
  SolveMethod method = SolveMethod::iterative;
  NormMode norm = NormMode::complement;
  ChainMode chain_mode = ChainMode::edge_confidence;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  }
};

template <typename Scalar>
struct SolveResult {
  Distribution<Scalar> distribution;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Largest dense system the direct solver will factor.
inline constexpr Eigen::Index kMaxDirectSize = 6000;

/// Power iteration pi_t = pi_{t-1} P until the max-norm step is <= epsilon.
template <typename Scalar>
SolveResult<Scalar> iterate(const PairwiseChain<Scalar>& chain, const Distribution<Scalar>& pi0,
                            const SolverConfig& cfg) {
  cfg.validate();
  if (!chain.stochastic() || !is_row_stochastic(chain)) {
    throw std::invalid_argument("iterate needs a row-stochastic chain");
  }
  if (pi0.size() != chain.size()) throw std::invalid_argument("pi0 has the wrong length");
  if ((pi0.array() < Scalar(0)).any() || !(pi0.sum() > Scalar(0))) {
    throw std::invalid_argument("pi0 must be non-negative with positive mass");
  }

  SolveResult<Scalar> result;
  Distribution<Scalar> pi = pi0 / pi0.sum();
  Distribution<Scalar> next(pi.size());
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    next = chain.step(pi);
    const Scalar step = (next - pi).cwiseAbs().maxCoeff();
    pi.swap(next);
    result.iterations = t;
    if (step <= Scalar(cfg.epsilon)) {
      result.converged = true;
      break;
    }
  }
  result.distribution = pi / pi.sum();
  return result;
}

namespace detail {

/// Gaussian elimination with partial pivoting; solves A x = b in place.
/// Throws SolverError when a pivot falls below `tolerance` times the largest
/// absolute entry of A.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eliminate(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a,
                                                   Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b,
                                                   Scalar tolerance = Scalar(1e-12)) {
  const Eigen::Index n = a.rows();
  const Scalar scale = std::max(Scalar(1), a.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot;
    const Scalar magnitude = a.col(k).tail(n - k).cwiseAbs().maxCoeff(&pivot);
    pivot += k;
    if (magnitude <= tolerance * scale) {
      throw SolverError("singular system at column " + std::to_string(k) +
                        "; the chain has more than the expected rank deficiency "
                        "(try a smaller damping value or the iterative method)");
    }
    if (pivot != k) {
      a.row(k).swap(a.row(pivot));
      std::swap(b(k), b(pivot));
    }
    const Eigen::Index rest = n - k - 1;
    if (rest == 0) break;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> factors = a.col(k).tail(rest) / a(k, k);
    a.bottomRightCorner(rest, rest).noalias() -= factors * a.row(k).tail(rest);
    b.tail(rest) -= factors * b(k);
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const Scalar known = a.row(k).tail(n - k - 1).dot(b.tail(n - k - 1));
    b(k) = (b(k) - known) / a(k, k);
  }
  return b;
}

/// Strongly connected components of a graph in CSR form (Tarjan, iterative).
/// Returns the component id of every node.
inline std::vector<Eigen::Index> strong_components(const std::vector<Eigen::Index>& outer,
                                                   const std::vector<Eigen::Index>& inner,
                                                   Eigen::Index& count) {
  const auto n = static_cast<Eigen::Index>(outer.size()) - 1;
  constexpr Eigen::Index unvisited = -1;
  std::vector<Eigen::Index> index(static_cast<std::size_t>(n), unvisited), low(index.size()),
      component(index.size(), unvisited);
  std::vector<Eigen::Index> stack;
  std::vector<bool> on_stack(index.size(), false);
  // Call stack of (node, offset of the next outgoing edge to inspect).
  std::vector<std::pair<Eigen::Index, Eigen::Index>> frames;
  Eigen::Index next_index = 0;
  count = 0;

  const auto at = [](const std::vector<Eigen::Index>& v, Eigen::Index i) {
    return v[static_cast<std::size_t>(i)];
  };
  for (Eigen::Index root = 0; root < n; ++root) {
    if (at(index, root) != unvisited) continue;
    frames.emplace_back(root, at(outer, root));
    while (!frames.empty()) {
      auto& [v, edge] = frames.back();
      const auto vs = static_cast<std::size_t>(v);
      if (index[vs] == unvisited) {
        index[vs] = low[vs] = next_index++;
        stack.push_back(v);
        on_stack[vs] = true;
      }
      bool descended = false;
      while (edge < at(outer, v + 1)) {
        const Eigen::Index w = at(inner, edge);
        const auto ws = static_cast<std::size_t>(w);
        if (index[ws] == unvisited) {
          frames.emplace_back(w, at(outer, w));
          descended = true;
          break;
        }
        if (on_stack[ws]) low[vs] = std::min(low[vs], index[ws]);
        ++edge;
      }
      if (descended) continue;
      if (low[vs] == index[vs]) {
        Eigen::Index w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          component[static_cast<std::size_t>(w)] = count;
        } while (w != v);
        ++count;
      }
      const Eigen::Index finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        auto& [parent, parent_edge] = frames.back();
        const auto ps = static_cast<std::size_t>(parent);
        low[ps] = std::min(low[ps], low[static_cast<std::size_t>(finished)]);
        ++parent_edge;
      }
    }
  }
  return component;
}

}  // namespace detail

/// Stationary distribution by direct solve of pi (P - I) = 0.
///
/// Each closed communicating class gets its own solve with one balance
/// equation replaced by sum(pi) = 1, so periodic classes need no damping.
/// When several closed classes exist the stationary distribution is not
/// unique; the classes are then weighted by the mass `pi0` eventually sends
/// into each of them (uniform `pi0` when none is given), which is the limit of
/// pi0 P^k for aperiodic chains.
template <typename Scalar>
SolveResult<Scalar> steady_state(const PairwiseChain<Scalar>& chain, const SolverConfig& cfg,
                                 const std::optional<Distribution<Scalar>>& pi0 = std::nullopt) {
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Iter = typename PairwiseChain<Scalar>::SparseMatrix::InnerIterator;
  cfg.validate();
  if (!chain.stochastic() || !is_row_stochastic(chain)) {
    throw std::invalid_argument("steady_state needs a row-stochastic chain");
  }
  const Eigen::Index n = chain.size();
  Distribution<Scalar> start = Distribution<Scalar>::Constant(n, Scalar(1) / Scalar(n));
  if (pi0) {
    if (pi0->size() != n) throw std::invalid_argument("pi0 has the wrong length");
    if ((pi0->array() < Scalar(0)).any() || !(pi0->sum() > Scalar(0))) {
      throw std::invalid_argument("pi0 must be non-negative with positive mass");
    }
    start = *pi0 / pi0->sum();
  }

  const auto& p = chain.transitions();
  const auto& restart_weight = chain.restart_weight();
  // Restart support; a dangling row reaches every state in it.
  std::vector<Eigen::Index> targets;
  if (chain.restart()) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if ((*chain.restart())(j) > Scalar(0)) targets.push_back(j);
    }
  }
  // Calls fn(column, weight) for every effective outgoing transition of `s`.
  const auto for_each_transition = [&](Eigen::Index s, auto&& fn) {
    for (Iter it(p, s); it; ++it) fn(it.col(), it.value());
    if (restart_weight(s) > Scalar(0)) {
      for (const auto j : targets) fn(j, restart_weight(s) * (*chain.restart())(j));
    }
  };

  // Transition graph in CSR form. Restart jumps route through one extra hub
  // node so the graph stays sparse; the hub never carries probability.
  const Eigen::Index hub = n;
  std::vector<Eigen::Index> outer{0}, inner;
  inner.reserve(static_cast<std::size_t>(p.nonZeros() + n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Iter it(p, i); it; ++it) inner.push_back(it.col());
    if (restart_weight(i) > Scalar(0)) inner.push_back(hub);
    outer.push_back(static_cast<Eigen::Index>(inner.size()));
  }
  inner.insert(inner.end(), targets.begin(), targets.end());
  outer.push_back(static_cast<Eigen::Index>(inner.size()));

  Eigen::Index count = 0;
  const auto component = detail::strong_components(outer, inner, count);
  const auto component_of = [&](Eigen::Index s) { return static_cast<std::size_t>(component[static_cast<std::size_t>(s)]); };
  std::vector<bool> closed(static_cast<std::size_t>(count), true);
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i <= n; ++i) {
    const auto c = component_of(i);
    if (i < n) members[c].push_back(i);
    for (auto e = outer[static_cast<std::size_t>(i)]; e < outer[static_cast<std::size_t>(i) + 1]; ++e) {
      if (component_of(inner[static_cast<std::size_t>(e)]) != c) closed[c] = false;
    }
  }

  // Local position of each state inside its class or inside the transient set.
  std::vector<Eigen::Index> local(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> transient;
  for (std::size_t c = 0; c < members.size(); ++c) {
    for (std::size_t k = 0; k < members[c].size(); ++k) {
      local[static_cast<std::size_t>(members[c][k])] = static_cast<Eigen::Index>(k);
    }
    if (!closed[c]) {
      for (const auto s : members[c]) {
        local[static_cast<std::size_t>(s)] = static_cast<Eigen::Index>(transient.size());
        transient.push_back(s);
      }
    }
  }

  // Mass that reaches each closed class: what starts there plus what the
  // transient states pass into it over their expected visits.
  std::vector<Scalar> class_mass(static_cast<std::size_t>(count), Scalar(0));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (closed[component_of(i)]) class_mass[component_of(i)] += start(i);
  }
  const auto t = static_cast<Eigen::Index>(transient.size());
  if (t > 0) {
    if (t > kMaxDirectSize) throw SolverError("transient set too large for the direct solver");
    Dense system = Dense::Identity(t, t);  // (I - P_TT)^T
    Vector rhs(t);
    for (Eigen::Index k = 0; k < t; ++k) {
      const Eigen::Index s = transient[static_cast<std::size_t>(k)];
      rhs(k) = start(s);
      for_each_transition(s, [&](Eigen::Index col, Scalar w) {
        if (!closed[component_of(col)]) system(local[static_cast<std::size_t>(col)], k) -= w;
      });
    }
    const Vector visits = detail::eliminate<Scalar>(std::move(system), std::move(rhs));
    for (Eigen::Index k = 0; k < t; ++k) {
      for_each_transition(transient[static_cast<std::size_t>(k)], [&](Eigen::Index col, Scalar w) {
        if (closed[component_of(col)]) class_mass[component_of(col)] += visits(k) * w;
      });
    }
  }

  Distribution<Scalar> pi = Distribution<Scalar>::Zero(n);
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (!closed[c] || class_mass[c] <= Scalar(0)) continue;
    const auto& states = members[c];
    const auto k = static_cast<Eigen::Index>(states.size());
    if (k == 1) {
      pi(states.front()) = class_mass[c];
      continue;
    }
    if (k > kMaxDirectSize) throw SolverError("closed class too large for the direct solver");
    // (P_CC - I)^T pi^T = 0, with the last equation replaced by sum(pi) = 1.
    Dense system = -Dense::Identity(k, k);
    for (const auto s : states) {
      for_each_transition(s, [&](Eigen::Index col, Scalar w) {
        system(local[static_cast<std::size_t>(col)], local[static_cast<std::size_t>(s)]) += w;
      });
    }
    system.row(k - 1).setOnes();
    Vector rhs = Vector::Zero(k);
    rhs(k - 1) = Scalar(1);
    const Vector solution = detail::eliminate<Scalar>(std::move(system), std::move(rhs));
    for (Eigen::Index j = 0; j < k; ++j) {
      pi(states[static_cast<std::size_t>(j)]) = class_mass[c] * solution(j);
    }
  }

  if ((pi.array() < Scalar(-1e-12)).any()) {
    throw SolverError("direct solve produced a negative probability; the system is ill-conditioned");
  }
  pi = pi.cwiseMax(Scalar(0));
  const Scalar total = pi.sum();
  if (!(total > Scalar(0))) throw SolverError("direct solve produced no probability mass");

  SolveResult<Scalar> result;
  result.distribution = pi / total;
  result.converged = true;
  return result;
}

}  // namespace ecalign
