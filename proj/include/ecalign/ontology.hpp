#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ecalign {

/// Malformed or inconsistent input data. Maps to CLI exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in an input file, with a 1-based line (and column when known).
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0);

  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

enum class EdgeKind { object_property, hierarchy };

/// Label given to every hierarchy edge so it takes part in label sets.
inline constexpr std::string_view kHierarchyLabel = "subClassOf";

struct Term {
  std::string id;
  std::string label;
};

struct LabeledEdge {
  std::string source;
  std::string target;
  std::string label;
  EdgeKind kind = EdgeKind::object_property;
};

using LabelSet = std::set<std::string>;

/// Terms plus labeled directed edges. Terms keep insertion order, which
/// fixes the row/column order of everything built from the graph.
class OntologyGraph {
 public:
  void add_term(std::string id, std::string label);
  /// Hierarchy edges ignore `label` and store kHierarchyLabel.
  void add_edge(std::string_view source, std::string_view target, std::string label,
                EdgeKind kind = EdgeKind::object_property);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<LabeledEdge>& edges() const { return edges_; }
  const Term& term(std::size_t index) const { return terms_.at(index); }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws DataError for unknown ids.
  std::size_t index_of(std::string_view id) const;

  /// Outgoing adjacency of one term: target index -> labels of all edges to it.
  const std::map<std::size_t, LabelSet>& successors(std::size_t index) const {
    return adjacency_.at(index);
  }

  /// Labels of all edges from `source` to `target`; empty when there is none.
  LabelSet label_set(std::string_view source, std::string_view target) const;
  LabelSet label_set(std::size_t source, std::size_t target) const;

 private:
  std::vector<Term> terms_;
  std::vector<LabeledEdge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::map<std::size_t, LabelSet>> adjacency_;
};

enum class OntologyFormat { json, triples };

OntologyGraph parse_ontology_json(std::string_view text);
OntologyGraph parse_ontology_triples(std::string_view text);
OntologyGraph parse_ontology(std::string_view text, OntologyFormat format);

/// `.nt`, `.triples` and `.txt` select the triples format; anything else is JSON.
OntologyFormat format_from_path(const std::filesystem::path& path);

OntologyGraph load_ontology(const std::filesystem::path& path, OntologyFormat format);
OntologyGraph load_ontology(const std::filesystem::path& path);

std::string to_json(const OntologyGraph& graph);
std::string to_triples(const OntologyGraph& graph);

/// Reads a whole file; throws DataError naming the path when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace ecalign
