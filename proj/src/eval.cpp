#include "ecalign/eval.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

namespace ecalign {

namespace {

std::size_t overlap(const PairSet& a, const PairSet& b) {
  std::size_t n = 0;
  for (const auto& p : a) n += b.contains(p) ? 1 : 0;
  return n;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string("—");
}

}  // namespace

PairSet pairs_of(const Alignment& alignment) {
  PairSet out;
  for (const auto& c : alignment.correspondences) out.emplace(c.source, c.target);
  return out;
}

PairSet parse_reference(std::string_view text) { return pairs_of(parse_alignment(text)); }

void check_reference(const PairSet& reference, const OntologyGraph& g1, const OntologyGraph& g2) {
  for (const auto& [s, t] : reference) {
    if (!g1.find(s)) throw DataError("reference names unknown source term '" + s + "'");
    if (!g2.find(t)) throw DataError("reference names unknown target term '" + t + "'");
  }
}

std::optional<double> precision(const PairSet& returned, const PairSet& valid) {
  if (returned.empty()) return std::nullopt;
  return static_cast<double>(overlap(returned, valid)) / static_cast<double>(returned.size());
}

double recall(const PairSet& returned, const PairSet& valid) {
  if (valid.empty()) throw std::invalid_argument("recall is undefined for an empty reference");
  return static_cast<double>(overlap(returned, valid)) / static_cast<double>(valid.size());
}

double f_measure(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

EvalReport evaluate(const PairSet& returned, const PairSet& valid) {
  EvalReport report;
  report.returned = returned.size();
  report.valid = valid.size();
  report.correct = overlap(returned, valid);
  report.precision = precision(returned, valid);
  if (!valid.empty()) report.recall = recall(returned, valid);
  if (report.precision && report.recall) report.f_measure = f_measure(*report.precision, *report.recall);
  return report;
}

std::string format_report(const EvalReport& r) {
  return "precision=" + format_optional(r.precision) + " recall=" + format_optional(r.recall) +
         " f=" + format_optional(r.f_measure) + " returned=" + std::to_string(r.returned) +
         " valid=" + std::to_string(r.valid) + " correct=" + std::to_string(r.correct);
}

std::vector<ComparisonRow> compare(std::string_view case_name, const OntologyGraph& g1,
                                   const OntologyGraph& g2, const PairSet& reference,
                                   const AlignOptions& options) {
  std::vector<ComparisonRow> rows;
  for (const auto mode : {ChainMode::baseline_sf, ChainMode::edge_confidence}) {
    AlignOptions run = options;
    run.solver.chain_mode = mode;
    const auto result = align(g1, g2, run);
    ComparisonRow row;
    row.case_name = std::string(case_name);
    row.mode = mode;
    row.report = evaluate(pairs_of(result.alignment), reference);
    row.iterations = result.iterations;
    row.converged = result.converged;
    row.transitions = result.transitions;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "case,mode,precision,recall,f_measure,returned,valid,correct,iterations,converged\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += row.case_name + ',' + std::string(to_string(row.mode)) + ',' +
           format_optional(r.precision) + ',' + format_optional(r.recall) + ',' +
           format_optional(r.f_measure) + ',' + std::to_string(r.returned) + ',' +
           std::to_string(r.valid) + ',' + std::to_string(r.correct) + ',' +
           std::to_string(row.iterations) + ',' + (row.converged ? "true" : "false") + '\n';
  }
  return out;
}

}  // namespace ecalign
