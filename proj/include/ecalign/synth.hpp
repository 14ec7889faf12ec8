#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ecalign/eval.hpp"
#include "ecalign/ontology.hpp"

namespace ecalign {

enum class MutationKind {
  /// Every object-property label gets 1 or 2 random character edits (one
  /// rewrite per distinct label, shared by all its edges).
  label_edit,
  /// Every term label is replaced by random lowercase letters of the same length.
  label_scramble,
  /// Each edge is dropped independently with probability `rate`.
  edge_drop,
  /// Letter case of term and object-property labels is flipped.
  label_case,
};

struct Mutation {
  MutationKind kind = MutationKind::label_edit;
  double rate = 0.0;
};

/// Parses `label-edit`, `label-scramble`, `label-case`, `edge-drop(0.2)` or `edge-drop:0.2`.
/// Throws std::invalid_argument for anything else.
Mutation parse_mutation(std::string_view text);
std::string to_string(const Mutation& mutation);

struct SynthCase {
  OntologyGraph graph;
  /// Identity correspondences between the input and the mutant (ids are kept).
  PairSet reference;
};

/// Deterministic mutated copy of `g`. Term ids and term order are preserved.
SynthCase synth_mutate(const OntologyGraph& g, std::uint64_t seed, const Mutation& mutation);

/// Same graph with terms (and edges) in a seeded random order.
OntologyGraph shuffle_terms(const OntologyGraph& g, std::uint64_t seed);

struct RandomOntologyShape {
  std::size_t terms = 10;
  std::size_t predicates = 4;
  std::size_t min_out = 1;
  std::size_t max_out = 3;
};

/// Random object-property ontology with concept-like term labels and
/// predicate labels drawn from a vocabulary of mutually distant words.
OntologyGraph random_ontology(std::uint64_t seed, const RandomOntologyShape& shape);

/// Predicate vocabulary used by random_ontology.
const std::vector<std::string>& predicate_vocabulary();

struct BenchmarkCase {
  std::string name;
  OntologyGraph source;
  OntologyGraph target;
  PairSet reference;
};

/// Label-perturbation benchmark: random ontologies whose copies have scrambled
/// term labels, every predicate label edited by 1-2 characters, and shuffled
/// term order.
std::vector<BenchmarkCase> label_perturbation_suite(std::uint64_t seed, std::size_t count);

/// Bounded draws on top of std::mt19937_64, whose output sequence is fixed by
/// the standard (the std distributions are not), so seeded output is portable.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ecalign
