#include "ecalign/ontology.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ecalign {

namespace {

std::string with_position(const std::string& what, std::size_t line, std::size_t column) {
  std::string out = what + " (line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out + ")";
}

bool is_hierarchy_predicate(std::string_view p) {
  return p == "subClassOf" || p == "rdfs:subClassOf" ||
         p == "<http://www.w3.org/2000/01/rdf-schema#subClassOf>";
}

// Maps a byte offset into (line, column), both 1-based.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : DataError(with_position(what, line, column)), message_(what), line_(line), column_(column) {}

void OntologyGraph::add_term(std::string id, std::string label) {
  if (id.empty()) throw DataError("term with empty id");
  if (label.empty()) throw DataError("term '" + id + "' has an empty label");
  if (index_.contains(id)) throw DataError("duplicate term id '" + id + "'");
  index_.emplace(id, terms_.size());
  terms_.push_back({std::move(id), std::move(label)});
  adjacency_.emplace_back();
}

void OntologyGraph::add_edge(std::string_view source, std::string_view target,
                             std::string label, EdgeKind kind) {
  if (kind == EdgeKind::hierarchy) label = std::string(kHierarchyLabel);
  if (label.empty()) {
    throw DataError("edge " + std::string(source) + " -> " + std::string(target) +
                    " has an empty label");
  }
  const auto from = find(source);
  const auto to = find(target);
  if (!from) throw DataError("edge references unknown term '" + std::string(source) + "'");
  if (!to) throw DataError("edge references unknown term '" + std::string(target) + "'");
  auto& labels = adjacency_[*from][*to];
  if (!labels.insert(label).second) {
    throw DataError("duplicate edge " + std::string(source) + " -" + label + "-> " +
                    std::string(target));
  }
  edges_.push_back({terms_[*from].id, terms_[*to].id, std::move(label), kind});
}

std::optional<std::size_t> OntologyGraph::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t OntologyGraph::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw DataError("unknown term id '" + std::string(id) + "'");
}

LabelSet OntologyGraph::label_set(std::string_view source, std::string_view target) const {
  return label_set(index_of(source), index_of(target));
}

LabelSet OntologyGraph::label_set(std::size_t source, std::size_t target) const {
  const auto& row = adjacency_.at(source);
  if (target >= terms_.size()) throw DataError("term index out of range");
  const auto it = row.find(target);
  return it == row.end() ? LabelSet{} : it->second;
}

OntologyGraph parse_ontology_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("invalid JSON: " + std::string(e.what()), line, column);
  }
  if (!doc.is_object()) throw ParseError("top-level value must be an object", 1, 1);

  OntologyGraph graph;
  try {
    for (const auto& t : doc.value("terms", json::array())) {
      const std::string id = t.at("id").get<std::string>();
      graph.add_term(id, t.contains("label") ? t.at("label").get<std::string>() : id);
    }
    for (const auto& e : doc.value("edges", json::array())) {
      const std::string kind = e.value("kind", std::string("object"));
      EdgeKind k;
      if (kind == "object") {
        k = EdgeKind::object_property;
      } else if (kind == "hierarchy") {
        k = EdgeKind::hierarchy;
      } else {
        throw DataError("unknown edge kind '" + kind + "'");
      }
      std::string label = e.value("label", std::string());
      graph.add_edge(e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                     std::move(label), k);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ontology JSON: ") + e.what());
  }
  return graph;
}

OntologyGraph parse_ontology_triples(std::string_view text) {
  OntologyGraph graph;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream fields(raw);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(std::move(t));
    if (tok.empty()) continue;
    if (tok.size() == 4 && tok.back() == ".") tok.pop_back();
    if (tok.size() != 3) {
      throw ParseError("expected 'subject predicate object', got " + std::to_string(tok.size()) +
                           " field(s)",
                       line_no);
    }
    for (const auto* id : {&tok[0], &tok[2]}) {
      if (!graph.find(*id)) graph.add_term(*id, *id);
    }
    const bool hierarchy = is_hierarchy_predicate(tok[1]);
    try {
      graph.add_edge(tok[0], tok[2], tok[1],
                     hierarchy ? EdgeKind::hierarchy : EdgeKind::object_property);
    } catch (const DataError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return graph;
}

OntologyGraph parse_ontology(std::string_view text, OntologyFormat format) {
  return format == OntologyFormat::json ? parse_ontology_json(text)
                                        : parse_ontology_triples(text);
}

OntologyFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".nt" || ext == ".triples" || ext == ".txt") return OntologyFormat::triples;
  return OntologyFormat::json;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

OntologyGraph load_ontology(const std::filesystem::path& path, OntologyFormat format) {
  const std::string text = read_file(path);
  try {
    return parse_ontology(text, format);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

OntologyGraph load_ontology(const std::filesystem::path& path) {
  return load_ontology(path, format_from_path(path));
}

std::string to_json(const OntologyGraph& graph) {
  nlohmann::ordered_json doc;
  auto& terms = doc["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : graph.terms()) terms.push_back({{"id", t.id}, {"label", t.label}});
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"from", e.source},
                     {"to", e.target},
                     {"label", e.label},
                     {"kind", e.kind == EdgeKind::hierarchy ? "hierarchy" : "object"}});
  }
  return doc.dump(2) + "\n";
}

// Labels that differ from ids and isolated terms are not representable here.
std::string to_triples(const OntologyGraph& graph) {
  std::string out;
  for (const auto& e : graph.edges()) out += e.source + ' ' + e.label + ' ' + e.target + '\n';
  return out;
}

}  // namespace ecalign
