#include "ecalign/lexical.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ecalign {

void SimilarityConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
}

std::string normalize_label(std::string_view label, LabelNorm norm) {
  if (norm == LabelNorm::none) return std::string(label);
  std::string out;
  out.reserve(label.size());
  for (const char c : label) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

namespace {

// Two-row DP over `a` x `b` with |b| <= |a|; `prev` and `cur` hold |b| + 1 cells.
std::size_t two_row(std::string_view a, std::string_view b, std::size_t* prev, std::size_t* cur) {
  std::iota(prev, prev + b.size() + 1, std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    const char ca = a[i - 1];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = prev[j - 1] + (ca != b[j - 1]);
      cur[j] = std::min(substitute, std::min(prev[j], cur[j - 1]) + 1);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Bit-parallel distance for |b| <= 64 (Myers 1999, in Hyyrö's formulation):
// bit j of the vertical delta vectors tracks column j of one DP row.
std::size_t bit_parallel(std::string_view a, std::string_view b) {
  thread_local std::array<std::uint64_t, 256> peq{};
  const auto key = [](char c) { return static_cast<unsigned char>(c); };
  for (std::size_t j = 0; j < b.size(); ++j) peq[key(b[j])] |= std::uint64_t{1} << j;
  const std::uint64_t last = std::uint64_t{1} << (b.size() - 1);
  std::uint64_t pv = ~std::uint64_t{0}, mv = 0;
  std::size_t score = b.size();
  for (const char c : a) {
    const std::uint64_t eq = peq[key(c)];
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    // At most one of the two bits is set.
    score += (ph & last) != 0;
    score -= (mh & last) != 0;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  for (const char c : b) peq[key(c)] = 0;
  return score;
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();
  if (b.size() <= 64) return bit_parallel(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  return two_row(a, b, prev.data(), cur.data());
}

std::optional<std::size_t> closest_label_distance(const LabelSet& a, const LabelSet& b,
                                                  LabelNorm norm) {
  std::optional<std::size_t> best;
  for (const auto& la : a) {
    const auto na = normalize_label(la, norm);
    for (const auto& lb : b) {
      const auto d = levenshtein(na, normalize_label(lb, norm));
      if (!best || d < *best) best = d;
      if (*best == 0) return best;
    }
  }
  return best;
}

bool labels_share_exact(const LabelSet& a, const LabelSet& b, LabelNorm norm) {
  for (const auto& la : a) {
    const auto na = normalize_label(la, norm);
    for (const auto& lb : b) {
      if (na == normalize_label(lb, norm)) return true;
    }
  }
  return false;
}

}  // namespace ecalign
