#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ecalign/ontology.hpp"

namespace ecalign {

enum class LabelNorm {
  none,
  /// ASCII case folding, with '_', '-' and spaces removed.
  fold,
};

struct SimilarityConfig {
  /// Edge confidence threshold on edit similarity, in [0, 1].
  double gamma = 0.5;
  LabelNorm label_norm = LabelNorm::fold;

  /// Throws std::invalid_argument when gamma is outside [0, 1].
  void validate() const;
};

std::string normalize_label(std::string_view label, LabelNorm norm);

/// Levenshtein distance with unit insert, delete and substitute costs.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// Edit similarity as an exact fraction: 1 at distance 0, 3/4 at distance 1,
/// 1/d beyond that.
struct SimilarityFraction {
  std::uint64_t numerator;
  std::uint64_t denominator;

  friend bool operator==(const SimilarityFraction&, const SimilarityFraction&) = default;
};

constexpr SimilarityFraction similarity_fraction(std::size_t distance) {
  if (distance == 0) return {1, 1};
  if (distance == 1) return {3, 4};
  return {1, distance};
}

template <typename Scalar = double>
Scalar similarity_from_distance(std::size_t distance) {
  const auto f = similarity_fraction(distance);
  return Scalar(f.numerator) / Scalar(f.denominator);
}

/// Edit similarity of two raw strings (no label normalization).
template <typename Scalar = double>
Scalar edit_similarity(std::string_view a, std::string_view b) {
  return similarity_from_distance<Scalar>(levenshtein(a, b));
}

/// Edge confidence from an edit similarity: 1/sigma when sigma >= gamma, else 0.
template <typename Scalar = double>
Scalar confidence_from_similarity(Scalar sigma, double gamma) {
  return sigma >= Scalar(gamma) ? Scalar(1) / sigma : Scalar(0);
}

/// Edge confidence between two edge labels, after normalization per `cfg`.
template <typename Scalar = double>
Scalar edge_confidence(std::string_view a, std::string_view b, const SimilarityConfig& cfg) {
  const auto sigma = edit_similarity<Scalar>(normalize_label(a, cfg.label_norm),
                                             normalize_label(b, cfg.label_norm));
  return confidence_from_similarity(sigma, cfg.gamma);
}

/// Smallest distance between any normalized label of `a` and any of `b`;
/// the pair that maximizes edit similarity. Empty when either set is empty.
std::optional<std::size_t> closest_label_distance(const LabelSet& a, const LabelSet& b,
                                                  LabelNorm norm);

/// Edge confidence of the most similar label pair across `a` x `b`.
template <typename Scalar = double>
Scalar label_set_confidence(const LabelSet& a, const LabelSet& b, const SimilarityConfig& cfg) {
  const auto d = closest_label_distance(a, b, cfg.label_norm);
  if (!d) return Scalar(0);
  return confidence_from_similarity(similarity_from_distance<Scalar>(*d), cfg.gamma);
}

/// True when the two sets share a label that is identical after normalization.
bool labels_share_exact(const LabelSet& a, const LabelSet& b, LabelNorm norm);

}  // namespace ecalign
