#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecalign/matching.hpp"
#include "ecalign/ontology.hpp"
#include "ecalign/pipeline.hpp"

namespace ecalign {

using PairSet = std::set<std::pair<std::string, std::string>>;

PairSet pairs_of(const Alignment& alignment);

/// Reference alignment from TSV `source<TAB>target` or alignment JSON; confidences ignored.
PairSet parse_reference(std::string_view text);

/// Checks that every pair names a term of the respective ontology.
void check_reference(const PairSet& reference, const OntologyGraph& g1, const OntologyGraph& g2);

/// |returned ∩ valid| / |returned|; nullopt when nothing was returned.
std::optional<double> precision(const PairSet& returned, const PairSet& valid);
/// |returned ∩ valid| / |valid|; throws std::invalid_argument when valid is empty.
double recall(const PairSet& returned, const PairSet& valid);
/// Harmonic mean of precision and recall, 0 when both are 0.
double f_measure(double p, double r);

struct EvalReport {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_measure;
  std::size_t returned = 0;
  std::size_t valid = 0;
  std::size_t correct = 0;
};

/// Undefined ratios (nothing returned, empty reference) are left empty.
EvalReport evaluate(const PairSet& returned, const PairSet& valid);

/// `precision=... recall=... f=... returned=N valid=N correct=N`; undefined values print as "—".
std::string format_report(const EvalReport& report);

struct ComparisonRow {
  std::string case_name;
  ChainMode mode = ChainMode::edge_confidence;
  EvalReport report;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t transitions = 0;
};

/// Runs the pipeline once per chain mode (baseline-sf, then edge-confidence)
/// with otherwise identical options and scores both against `reference`.
std::vector<ComparisonRow> compare(std::string_view case_name, const OntologyGraph& g1,
                                   const OntologyGraph& g2, const PairSet& reference,
                                   const AlignOptions& options);

/// Header `case,mode,precision,recall,f_measure,returned,valid,correct,iterations,converged`.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace ecalign
