#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ecalign/matching.hpp"

using namespace ecalign;

namespace {

// Best total over all injective maps from the smaller side into the larger one.
double brute_force_best(const Eigen::MatrixXd& w) {
  const bool transpose = w.rows() > w.cols();
  const Eigen::MatrixXd m = transpose ? Eigen::MatrixXd(w.transpose()) : w;
  std::vector<Eigen::Index> cols(static_cast<std::size_t>(m.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = -1.0;
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) total += m(i, cols[static_cast<std::size_t>(i)]);
    best = std::max(best, total);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

double total(const Eigen::MatrixXd& w, const Assignment& a) {
  double sum = 0.0;
  for (const auto& [i, j] : a) sum += w(i, j);
  return sum;
}

bool one_to_one(const Assignment& a) {
  std::set<Eigen::Index> rows, cols;
  for (const auto& [i, j] : a) {
    if (!rows.insert(i).second || !cols.insert(j).second) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("hungarian examples") {
  Eigen::Matrix2d square;
  square << 0.9, 0.1, 0.2, 0.8;
  CHECK(hungarian_max(square) == Assignment{{0, 0}, {1, 1}});

  CHECK(hungarian_max(Eigen::Matrix3d::Identity()) == Assignment{{0, 0}, {1, 1}, {2, 2}});

  Eigen::Matrix<double, 3, 2> tall;
  tall << 0.5, 0.1, 0.9, 0.2, 0.1, 0.8;
  CHECK(hungarian_max(tall) == Assignment{{1, 0}, {2, 1}});
  CHECK(hungarian_max(Eigen::MatrixXd(tall.transpose())) == Assignment{{0, 1}, {1, 2}});
}

TEST_CASE("ties resolve to the lexicographically smallest optimum") {
  CHECK(hungarian_max(Eigen::Matrix3d::Ones()) == Assignment{{0, 0}, {1, 1}, {2, 2}});
  Eigen::Matrix2d anti;
  anti << 1, 1, 1, 1;
  CHECK(hungarian_max(anti) == Assignment{{0, 0}, {1, 1}});
  Eigen::Matrix<double, 2, 3> wide = Eigen::Matrix<double, 2, 3>::Zero();
  CHECK(hungarian_max(wide) == Assignment{{0, 0}, {1, 1}});
}

TEST_CASE("hungarian matches brute force on random matrices") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 6), small(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const int m = dim(rng), n = dim(rng);
    Eigen::MatrixXd w(m, n);
    // Half of the instances use few distinct values to provoke ties.
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) w(i, j) = k % 2 ? unit(rng) : small(rng);
    }
    const auto a = hungarian_max(w);
    CHECK(a.size() == static_cast<std::size_t>(std::min(m, n)));
    CHECK(one_to_one(a));
    CHECK(total(w, a) == doctest::Approx(brute_force_best(w)));

    const auto scaled = hungarian_max(Eigen::MatrixXd(w * 7.5));
    CHECK(scaled == a);

    // Greedy row-max baseline.
    std::set<Eigen::Index> used;
    double greedy = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index best = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!used.contains(j) && (best < 0 || w(i, j) > w(i, best))) best = j;
      }
      if (best >= 0) {
        used.insert(best);
        greedy += w(i, best);
      }
    }
    CHECK(total(w, a) >= greedy - 1e-12);
  }
}

TEST_CASE("hungarian rejects bad input") {
  CHECK_THROWS_AS(hungarian_max(Eigen::MatrixXd(0, 3)), std::invalid_argument);
  Eigen::Matrix2d negative;
  negative << 1, -1, 0, 1;
  CHECK_THROWS_AS(hungarian_max(negative), std::invalid_argument);
}

TEST_CASE("to_matrix rescales by the maximum") {
  const auto one = chain_from_matrix(Eigen::Matrix<double, 1, 1>::Zero(), false);
  CHECK(to_matrix<double>(Distribution<double>::Ones(1), one.states()) == Eigen::MatrixXd::Ones(1, 1));

  std::vector<PairState> grid;
  for (Eigen::Index i = 0; i < 4; ++i) grid.push_back({i / 2, i % 2, i});
  Distribution<double> dist(4);
  dist << 0.4, 0.1, 0.1, 0.4;
  Eigen::Matrix2d expected;
  expected << 1.0, 0.25, 0.25, 1.0;
  CHECK(to_matrix<double>(dist, grid).isApprox(Eigen::MatrixXd(expected)));
  CHECK(to_matrix<double>(Distribution<double>::Constant(4, 0.25), grid) == Eigen::MatrixXd::Ones(2, 2));

  CHECK_THROWS_AS(to_matrix<double>(Distribution<double>::Zero(4), grid), std::invalid_argument);
  CHECK_THROWS_AS(to_matrix<double>(Distribution<double>::Ones(3), grid), std::invalid_argument);
}

TEST_CASE("refine") {
  const PairwiseChain<double> chain({"a", "b"}, {"x", "y"}, PairwiseChain<double>::SparseMatrix(4, 4),
                                    ChainMode::edge_confidence, false);
  Distribution<double> dist(4);
  dist << 0.9, 0.1, 0.2, 0.8;
  const auto all = refine(dist, chain);
  REQUIRE(all.correspondences.size() == 2);
  CHECK(all.correspondences[0].source == "a");
  CHECK(all.correspondences[0].target == "x");
  CHECK(all.correspondences[0].confidence == 1.0);
  CHECK(all.correspondences[1].source == "b");
  CHECK(all.correspondences[1].target == "y");
  CHECK(all.correspondences[1].confidence == doctest::Approx(0.8 / 0.9));

  const auto top = refine(dist, chain, 1.0);
  REQUIRE(top.correspondences.size() == 1);
  CHECK(top.correspondences[0].target == "x");
}

TEST_CASE("alignment serialization round-trips") {
  Alignment a;
  a.correspondences = {{"A", "D", 1.0}, {"B", "E", 0.25}};
  a.metadata = AlignmentMetadata{0.5, "fold", "iterative", "complement", "edge-confidence", 0.85, "restart", 12, true};
  for (const auto& text : {to_json(a), to_tsv(a)}) {
    const auto back = parse_alignment(text);
    REQUIRE(back.correspondences.size() == 2);
    CHECK(back.correspondences[1].source == "B");
    CHECK(back.correspondences[1].target == "E");
    CHECK(back.correspondences[1].confidence == 0.25);
  }
  CHECK(to_tsv(a) == "A\tD\t1\nB\tE\t0.25\n");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
}
