#include "ecalign/synth.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "ecalign/lexical.hpp"

namespace ecalign {

namespace {

constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";

char random_letter(SeededRng& rng) { return kLetters[rng.below(kLetters.size())]; }

std::string flip_case(std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z') {
      c = static_cast<char>(c - 'a' + 'A');
    } else if (c >= 'A' && c <= 'Z') {
      c = static_cast<char>(c - 'A' + 'a');
    }
  }
  return s;
}

// One random insert, delete or substitute.
std::string random_edit(std::string s, SeededRng& rng) {
  const auto op = s.size() > 1 ? rng.below(3) : rng.below(2);
  if (op == 0) {
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size() + 1)), random_letter(rng));
  } else if (op == 1) {
    auto& c = s[rng.below(s.size())];
    char replacement = c;
    while (replacement == c) replacement = random_letter(rng);
    c = replacement;
  } else {
    s.erase(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size())));
  }
  return s;
}

// A label exactly `edits` edits away from `label` after case folding.
std::string edited_label(const std::string& label, std::size_t edits, SeededRng& rng) {
  const auto folded = normalize_label(label, LabelNorm::fold);
  std::string candidate;
  for (int attempt = 0; attempt < 64; ++attempt) {
    candidate = label;
    for (std::size_t k = 0; k < edits; ++k) candidate = random_edit(candidate, rng);
    const auto folded_candidate = normalize_label(candidate, LabelNorm::fold);
    if (!folded_candidate.empty() && levenshtein(folded, folded_candidate) == edits) return candidate;
  }
  return candidate;
}

OntologyGraph rebuild(const OntologyGraph& g, const std::vector<std::string>& term_labels,
                      const std::vector<LabeledEdge>& edges) {
  OntologyGraph out;
  for (std::size_t i = 0; i < g.size(); ++i) out.add_term(g.term(i).id, term_labels[i]);
  for (const auto& e : edges) out.add_edge(e.source, e.target, e.label, e.kind);
  return out;
}

PairSet identity_reference(const OntologyGraph& g) {
  PairSet out;
  for (const auto& t : g.terms()) out.emplace(t.id, t.id);
  return out;
}

}  // namespace

Mutation parse_mutation(std::string_view text) {
  if (text == "label-edit") return {MutationKind::label_edit, 0.0};
  if (text == "label-scramble") return {MutationKind::label_scramble, 0.0};
  if (text == "label-case") return {MutationKind::label_case, 0.0};
  constexpr std::string_view drop = "edge-drop";
  if (text.starts_with(drop)) {
    auto rest = text.substr(drop.size());
    if (rest.starts_with(':')) {
      rest.remove_prefix(1);
    } else if (rest.starts_with('(') && rest.ends_with(')')) {
      rest = rest.substr(1, rest.size() - 2);
    } else {
      rest = {};
    }
    double rate = -1.0;
    const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), rate);
    if (!rest.empty() && res.ec == std::errc() && res.ptr == rest.data() + rest.size() &&
        rate >= 0.0 && rate <= 1.0) {
      return {MutationKind::edge_drop, rate};
    }
    throw std::invalid_argument("edge-drop needs a rate in [0, 1], e.g. edge-drop(0.2)");
  }
  throw std::invalid_argument("unknown mutation '" + std::string(text) + "'");
}

std::string to_string(const Mutation& m) {
  switch (m.kind) {
    case MutationKind::label_edit:
      return "label-edit";
    case MutationKind::label_scramble:
      return "label-scramble";
    case MutationKind::label_case:
      return "label-case";
    case MutationKind::edge_drop:
      return "edge-drop(" + format_number(m.rate) + ")";
  }
  return {};
}

SynthCase synth_mutate(const OntologyGraph& g, std::uint64_t seed, const Mutation& mutation) {
  if (g.empty()) throw std::invalid_argument("cannot mutate an empty ontology");
  SeededRng rng(seed);
  std::vector<std::string> labels;
  for (const auto& t : g.terms()) labels.push_back(t.label);
  std::vector<LabeledEdge> edges = g.edges();

  switch (mutation.kind) {
    case MutationKind::label_edit: {
      // Distinct labels in first-seen order, so the rewrite is independent of map layout.
      std::map<std::string, std::string> rewrite;
      for (const auto& e : edges) {
        if (e.kind != EdgeKind::object_property || rewrite.contains(e.label)) continue;
        rewrite.emplace(e.label, edited_label(e.label, 1 + rng.below(2), rng));
      }
      for (auto& e : edges) {
        if (e.kind == EdgeKind::object_property) e.label = rewrite.at(e.label);
      }
      // Edits can collide with another predicate on the same term pair; keep the first.
      std::set<std::tuple<std::string, std::string, std::string>> seen;
      std::erase_if(edges, [&](const LabeledEdge& e) {
        return !seen.emplace(e.source, e.target, e.label).second;
      });
      break;
    }
    case MutationKind::label_scramble:
      for (auto& label : labels) {
        std::string scrambled;
        for (std::size_t k = 0; k < label.size(); ++k) scrambled.push_back(random_letter(rng));
        label = std::move(scrambled);
      }
      break;
    case MutationKind::edge_drop:
      if (!(mutation.rate >= 0.0 && mutation.rate <= 1.0)) {
        throw std::invalid_argument("edge-drop rate must lie in [0, 1]");
      }
      std::erase_if(edges, [&](const LabeledEdge&) { return rng.unit() < mutation.rate; });
      break;
    case MutationKind::label_case:
      for (auto& label : labels) label = flip_case(label);
      for (auto& e : edges) {
        if (e.kind == EdgeKind::object_property) e.label = flip_case(e.label);
      }
      break;
  }
  return {rebuild(g, labels, edges), identity_reference(g)};
}

OntologyGraph shuffle_terms(const OntologyGraph& g, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<std::size_t> order(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<LabeledEdge> edges = g.edges();
  rng.shuffle(edges);

  OntologyGraph out;
  for (const auto i : order) out.add_term(g.term(i).id, g.term(i).label);
  for (const auto& e : edges) out.add_edge(e.source, e.target, e.label, e.kind);
  return out;
}

const std::vector<std::string>& predicate_vocabulary() {
  static const std::vector<std::string> words = {
      "hasAuthor", "publishedIn", "references", "memberOf", "locatedIn",    "fundedBy",
      "reviews",   "supervises",  "employs",    "attends",  "containsPart", "teaches"};
  return words;
}

OntologyGraph random_ontology(std::uint64_t seed, const RandomOntologyShape& shape) {
  static const std::vector<std::string> concepts = {
      "Article",    "Book",        "Journal",     "Person",   "Author",    "Editor",
      "Publisher",  "Conference",  "Proceedings", "Chapter",  "Thesis",    "Report",
      "Institution", "Address",    "Series",      "Volume",   "Issue",     "Review",
      "Topic",      "Keyword",     "Abstract",    "Citation", "Grant",     "Workshop",
      "Manuscript", "Organization", "Department", "Lecture",  "Course",    "Student"};
  const auto& vocabulary = predicate_vocabulary();
  if (shape.terms < 2 || shape.terms > concepts.size()) {
    throw std::invalid_argument("random ontology size must lie in [2, " +
                                std::to_string(concepts.size()) + "]");
  }
  if (shape.predicates == 0 || shape.predicates > vocabulary.size()) {
    throw std::invalid_argument("predicate count must lie in [1, " +
                                std::to_string(vocabulary.size()) + "]");
  }
  if (shape.min_out > shape.max_out) throw std::invalid_argument("min_out exceeds max_out");

  SeededRng rng(seed);
  auto labels = concepts;
  rng.shuffle(labels);
  auto predicates = vocabulary;
  rng.shuffle(predicates);
  predicates.resize(shape.predicates);

  OntologyGraph g;
  for (std::size_t i = 0; i < shape.terms; ++i) g.add_term("t" + std::to_string(i), labels[i]);
  for (std::size_t i = 0; i < shape.terms; ++i) {
    const auto degree = shape.min_out + rng.below(shape.max_out - shape.min_out + 1);
    for (std::size_t k = 0; k < degree; ++k) {
      auto target = rng.below(shape.terms - 1);
      if (target >= i) ++target;  // no self-loops
      const auto& p = predicates[rng.below(predicates.size())];
      if (g.label_set(i, target).contains(p)) continue;
      g.add_edge(g.term(i).id, g.term(target).id, p);
    }
  }
  return g;
}

std::vector<BenchmarkCase> label_perturbation_suite(std::uint64_t seed, std::size_t count) {
  std::vector<BenchmarkCase> cases;
  SeededRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t case_seed = rng.below(std::uint64_t{1} << 62);
    RandomOntologyShape shape;
    shape.terms = 8 + i % 7;
    shape.predicates = 3 + i % 4;
    auto source = random_ontology(case_seed, shape);
    auto scrambled = synth_mutate(source, case_seed + 1, {MutationKind::label_scramble, 0.0});
    auto edited = synth_mutate(scrambled.graph, case_seed + 2, {MutationKind::label_edit, 0.0});
    BenchmarkCase c;
    c.name = "perturb-" + std::to_string(i);
    c.target = shuffle_terms(edited.graph, case_seed + 3);
    c.reference = scrambled.reference;
    c.source = std::move(source);
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace ecalign
