#include "ecalign/pipeline.hpp"

#include <stdexcept>

namespace ecalign {

void AlignOptions::validate() const {
  similarity.validate();
  solver.validate();
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw std::invalid_argument("min_confidence must lie in [0, 1]");
  }
}

PairwiseChain<double> transition_chain(const OntologyGraph& g1, const OntologyGraph& g2,
                                       const AlignOptions& options) {
  options.validate();
  const auto upmc = build_upmc<double>(g1, g2, options.similarity, options.solver.chain_mode);
  if (options.solver.damping_mode == DampingMode::lazy) return normalize(upmc, options.solver.norm);
  return normalize(upmc, options.solver.norm,
                   std::optional(initial_distribution(upmc, g1, g2, options.similarity)));
}

PairwiseChain<double> damp(const PairwiseChain<double>& chain, const Distribution<double>& pi0,
                           const SolverConfig& solver) {
  if (solver.damping_mode == DampingMode::lazy) return ergodic_transform(chain, solver.damping);
  return restart_transform(chain, solver.damping, pi0);
}

AlignResult align(const OntologyGraph& g1, const OntologyGraph& g2, const AlignOptions& options) {
  options.validate();
  const auto upmc = build_upmc<double>(g1, g2, options.similarity, options.solver.chain_mode);
  const auto pi0 = initial_distribution(upmc, g1, g2, options.similarity);
  const auto chain = damp(transition_chain(g1, g2, options), pi0, options.solver);

  const auto solved = options.solver.method == SolveMethod::iterative
                          ? iterate(chain, pi0, options.solver)
                          : steady_state(chain, options.solver, std::optional(pi0));

  AlignResult result;
  result.alignment = refine(solved.distribution, chain, options.min_confidence);
  result.iterations = solved.iterations;
  result.converged = solved.converged;
  result.transitions = static_cast<std::size_t>(upmc.transitions().nonZeros());

  AlignmentMetadata meta;
  meta.gamma = options.similarity.gamma;
  meta.label_norm = to_string(options.similarity.label_norm);
  meta.method = to_string(options.solver.method);
  meta.norm_mode = to_string(options.solver.norm);
  meta.chain_mode = to_string(options.solver.chain_mode);
  meta.damping = options.solver.damping;
  meta.damping_mode = to_string(options.solver.damping_mode);
  meta.iterations = solved.iterations;
  meta.converged = solved.converged;
  result.alignment.metadata = meta;
  return result;
}

std::string to_triplet_csv(const PairwiseChain<double>& chain) {
  std::string out = "row,col,weight\n";
  // Restart rows are written out in full.
  const PairwiseChain<double>::SparseMatrix p = chain.has_restart() ? chain.dense().sparseView() : chain.transitions();
  for (Eigen::Index i = 0; i < p.outerSize(); ++i) {
    for (PairwiseChain<double>::SparseMatrix::InnerIterator it(p, i); it; ++it) {
      out += std::to_string(it.row()) + ',' + std::to_string(it.col()) + ',' +
             format_number(it.value()) + '\n';
    }
  }
  return out;
}

std::string_view to_string(ChainMode mode) {
  return mode == ChainMode::edge_confidence ? "edge-confidence" : "baseline-sf";
}

std::string_view to_string(NormMode mode) {
  return mode == NormMode::formula ? "formula" : "complement";
}

std::string_view to_string(SolveMethod method) {
  return method == SolveMethod::iterative ? "iterative" : "steady-state";
}

std::string_view to_string(DampingMode mode) {
  return mode == DampingMode::restart ? "restart" : "lazy";
}

std::string_view to_string(LabelNorm norm) { return norm == LabelNorm::none ? "none" : "fold"; }

ChainMode parse_chain_mode(std::string_view name) {
  if (name == "edge-confidence") return ChainMode::edge_confidence;
  if (name == "baseline-sf") return ChainMode::baseline_sf;
  throw std::invalid_argument("unknown chain mode '" + std::string(name) + "'");
}

NormMode parse_norm_mode(std::string_view name) {
  if (name == "formula") return NormMode::formula;
  if (name == "complement") return NormMode::complement;
  throw std::invalid_argument("unknown normalization '" + std::string(name) + "'");
}

SolveMethod parse_solve_method(std::string_view name) {
  if (name == "iterative") return SolveMethod::iterative;
  if (name == "steady-state") return SolveMethod::steady_state;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

DampingMode parse_damping_mode(std::string_view name) {
  if (name == "restart") return DampingMode::restart;
  if (name == "lazy") return DampingMode::lazy;
  throw std::invalid_argument("unknown damping mode '" + std::string(name) + "'");
}

LabelNorm parse_label_norm(std::string_view name) {
  if (name == "none") return LabelNorm::none;
  if (name == "fold") return LabelNorm::fold;
  throw std::invalid_argument("unknown label normalization '" + std::string(name) + "'");
}

}  // namespace ecalign
