#include <charconv>
#include <sstream>

#include "ecalign/matching.hpp"
#include "ecalign/ontology.hpp"
#include "json.hpp"

namespace ecalign {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_json(const Alignment& alignment) {
  nlohmann::ordered_json doc;
  auto& meta = doc["metadata"] = nlohmann::ordered_json::object();
  if (const auto& m = alignment.metadata) {
    meta["gamma"] = m->gamma;
    meta["label_norm"] = m->label_norm;
    meta["method"] = m->method;
    meta["norm_mode"] = m->norm_mode;
    meta["chain_mode"] = m->chain_mode;
    meta["damping"] = m->damping;
    meta["damping_mode"] = m->damping_mode;
    meta["iterations"] = m->iterations;
    meta["converged"] = m->converged;
  }
  auto& list = doc["correspondences"] = nlohmann::ordered_json::array();
  for (const auto& c : alignment.correspondences) {
    list.push_back({{"source", c.source}, {"target", c.target}, {"confidence", c.confidence}});
  }
  return doc.dump(2) + "\n";
}

std::string to_tsv(const Alignment& alignment) {
  std::string out;
  for (const auto& c : alignment.correspondences) {
    out += c.source + '\t' + c.target + '\t' + format_number(c.confidence) + '\n';
  }
  return out;
}

namespace {

Alignment parse_alignment_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid alignment JSON: ") + e.what(), 1);
  }
  Alignment alignment;
  try {
    for (const auto& c : doc.at("correspondences")) {
      alignment.correspondences.push_back({c.at("source").get<std::string>(),
                                           c.at("target").get<std::string>(),
                                           c.value("confidence", 1.0)});
    }
    if (doc.contains("metadata") && !doc["metadata"].empty()) {
      const auto& m = doc["metadata"];
      AlignmentMetadata meta;
      meta.gamma = m.value("gamma", 0.0);
      meta.label_norm = m.value("label_norm", std::string());
      meta.method = m.value("method", std::string());
      meta.norm_mode = m.value("norm_mode", std::string());
      meta.chain_mode = m.value("chain_mode", std::string());
      meta.damping = m.value("damping", 0.0);
      meta.damping_mode = m.value("damping_mode", std::string());
      meta.iterations = m.value("iterations", std::size_t{0});
      meta.converged = m.value("converged", false);
      alignment.metadata = meta;
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed alignment JSON: ") + e.what());
  }
  return alignment;
}

Alignment parse_alignment_tsv(std::string_view text) {
  Alignment alignment;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
      fields.push_back(line.substr(start, tab - start));
    }
    fields.push_back(line.substr(start));
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected 'source<TAB>target[<TAB>confidence]'", line_no);
    }
    double confidence = 1.0;
    if (fields.size() == 3) {
      const auto& f = fields[2];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), confidence);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ParseError("bad confidence '" + f + "'", line_no);
      }
    }
    alignment.correspondences.push_back({fields[0], fields[1], confidence});
  }
  return alignment;
}

}  // namespace

Alignment parse_alignment(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_alignment_json(text);
  return parse_alignment_tsv(text);
}

}  // namespace ecalign
