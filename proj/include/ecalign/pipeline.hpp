#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "ecalign/chain.hpp"
#include "ecalign/lexical.hpp"
#include "ecalign/matching.hpp"
#include "ecalign/ontology.hpp"
#include "ecalign/solver.hpp"

namespace ecalign {

struct AlignOptions {
  SimilarityConfig similarity;
  SolverConfig solver;
  /// Correspondences with a rescaled score below this are dropped.
  double min_confidence = 0.0;

  void validate() const;
};

struct AlignResult {
  Alignment alignment;
  std::size_t iterations = 0;
  bool converged = false;
  /// Stored transitions of the unnormalized chain (its structural support).
  std::size_t transitions = 0;
};

/// Normalized (row-stochastic, undamped) chain for two ontologies.
PairwiseChain<double> transition_chain(const OntologyGraph& g1, const OntologyGraph& g2,
                                       const AlignOptions& options);

/// Damped chain the solvers run on, per `solver.damping_mode`; `pi0` is the
/// restart distribution.
PairwiseChain<double> damp(const PairwiseChain<double>& chain, const Distribution<double>& pi0,
                           const SolverConfig& solver);

/// Full pipeline: build, normalize, damp, solve from the lexical start
/// distribution, then refine into a one-to-one alignment.
AlignResult align(const OntologyGraph& g1, const OntologyGraph& g2, const AlignOptions& options);

/// Sparse `row,col,weight` dump of a chain's transition matrix, with header.
std::string to_triplet_csv(const PairwiseChain<double>& chain);

std::string_view to_string(ChainMode mode);
std::string_view to_string(NormMode mode);
std::string_view to_string(SolveMethod method);
std::string_view to_string(DampingMode mode);
std::string_view to_string(LabelNorm norm);

/// Throw std::invalid_argument on unknown names.
ChainMode parse_chain_mode(std::string_view name);
NormMode parse_norm_mode(std::string_view name);
SolveMethod parse_solve_method(std::string_view name);
DampingMode parse_damping_mode(std::string_view name);
LabelNorm parse_label_norm(std::string_view name);

}  // namespace ecalign
