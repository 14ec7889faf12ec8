#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "ecalign/chain.hpp"
#include "ecalign/synth.hpp"

using namespace ecalign;

namespace {

struct SmallPair {
  OntologyGraph left, right;
  SmallPair() {
    for (const auto* id : {"A", "B", "C"}) left.add_term(id, id);
    left.add_edge("A", "B", "m");
    left.add_edge("B", "C", "n");
    left.add_edge("C", "A", "o");
    for (const auto* id : {"D", "E", "F"}) right.add_term(id, id);
    right.add_edge("D", "E", "m'");
    right.add_edge("E", "F", "n'");
    right.add_edge("F", "D", "o'");
    right.add_edge("D", "F", "p");
  }
};

using Support = std::set<std::pair<Eigen::Index, Eigen::Index>>;

Support support(const PairwiseChain<double>& chain) {
  Support out;
  const auto& p = chain.transitions();
  for (Eigen::Index i = 0; i < p.outerSize(); ++i) {
    for (PairwiseChain<double>::SparseMatrix::InnerIterator it(p, i); it; ++it) out.emplace(i, it.col());
  }
  return out;
}

// One-row unnormalized chain (with a trailing empty row) holding `weights`.
PairwiseChain<double> single_row(const std::vector<double>& weights, ChainMode mode) {
  const auto n = static_cast<Eigen::Index>(weights.size()) + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n - 1; ++j) m(0, j + 1) = weights[static_cast<std::size_t>(j)];
  const auto raw = chain_from_matrix(m, false);
  return {raw.left_ids(), raw.right_ids(), raw.transitions(), mode, false};
}

}  // namespace

TEST_CASE("pair states enumerate the cross product") {
  const SmallPair pair;
  const auto chain = build_upmc<double>(pair.left, pair.right, {}, ChainMode::edge_confidence);
  CHECK(chain.size() == 9);
  for (Eigen::Index i = 0; i < chain.size(); ++i) {
    const auto s = chain.state(i);
    CHECK(chain.state_index(s.left, s.right) == i);
  }
}

TEST_CASE("UPMC transitions of the small example") {
  const SmallPair pair;
  SimilarityConfig cfg;
  cfg.gamma = 0.0;
  const auto chain = build_upmc<double>(pair.left, pair.right, cfg, ChainMode::edge_confidence);
  const auto ad = chain.state_index(0, 0);
  Support from_ad;
  for (const auto& edge : support(chain)) {
    if (edge.first == ad) from_ad.insert(edge);
  }
  CHECK(from_ad == Support{{ad, chain.state_index(1, 1)}, {ad, chain.state_index(1, 2)}});
  // One transition per pair of edges.
  CHECK(chain.transitions().nonZeros() == 3 * 4);

  const auto baseline = build_upmc<double>(pair.left, pair.right, cfg, ChainMode::baseline_sf);
  CHECK(baseline.transitions().nonZeros() == 0);
}

TEST_CASE("single terms give one state and no transitions") {
  OntologyGraph a, b;
  a.add_term("x", "x");
  b.add_term("y", "y");
  const auto chain = build_upmc<double>(a, b, {}, ChainMode::edge_confidence);
  CHECK(chain.size() == 1);
  CHECK(chain.transitions().nonZeros() == 0);
}

TEST_CASE("baseline support relates to edge-confidence support") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto g1 = random_ontology(seed, {7, 4, 1, 3});
    const auto g2 = synth_mutate(g1, seed, {MutationKind::label_edit, 0.0}).graph;
    const auto g3 = random_ontology(seed + 100, {6, 4, 1, 3});
    for (const auto* other : {&g1, &g2, &g3}) {
      SimilarityConfig exact;
      exact.gamma = 1.0;
      const auto base = support(build_upmc<double>(g1, *other, exact, ChainMode::baseline_sf));
      CHECK(support(build_upmc<double>(g1, *other, exact, ChainMode::edge_confidence)) == base);
      for (const double gamma : {0.0, 0.3, 0.5}) {
        SimilarityConfig loose;
        loose.gamma = gamma;
        const auto ec = support(build_upmc<double>(g1, *other, loose, ChainMode::edge_confidence));
        CHECK(std::includes(ec.begin(), ec.end(), base.begin(), base.end()));
      }
    }
  }
}

TEST_CASE("normalize row examples") {
  const auto formula = normalize(single_row({2, 4}, ChainMode::edge_confidence), NormMode::formula);
  CHECK(formula.transitions().coeff(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(formula.transitions().coeff(0, 2) == doctest::Approx(2.0 / 3.0));

  const auto complement = normalize(single_row({2, 4}, ChainMode::edge_confidence), NormMode::complement);
  CHECK(complement.transitions().coeff(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(complement.transitions().coeff(0, 2) == doctest::Approx(1.0 / 3.0));

  const auto uniform = normalize(single_row({2, 4, 1}, ChainMode::baseline_sf), NormMode::formula);
  for (Eigen::Index j = 1; j <= 3; ++j) CHECK(uniform.transitions().coeff(0, j) == doctest::Approx(1.0 / 3.0));

  for (const auto norm : {NormMode::formula, NormMode::complement}) {
    const auto one = normalize(single_row({5}, ChainMode::edge_confidence), norm);
    CHECK(one.transitions().coeff(0, 1) == 1.0);
    // The trailing empty row becomes a self-loop.
    CHECK(one.transitions().coeff(1, 1) == 1.0);
    CHECK(one.transitions().nonZeros() == 2);
    CHECK(is_row_stochastic(one));
  }
}

TEST_CASE("normalize with a restart sends empty rows to it") {
  const auto raw = single_row({2, 4}, ChainMode::edge_confidence);
  const Distribution<double> restart = Distribution<double>::Constant(3, 2.0);
  const auto chain = normalize(raw, NormMode::complement, std::optional(restart));
  CHECK(chain.has_restart());
  CHECK(chain.restart_weight()(0) == 0.0);
  CHECK(chain.restart_weight()(1) == 1.0);
  CHECK(chain.restart()->sum() == doctest::Approx(1.0));
  CHECK(is_row_stochastic(chain));
  const Eigen::MatrixXd p = chain.dense();
  CHECK(p(1, 0) == doctest::Approx(1.0 / 3.0));

  const Distribution<double> pi = Distribution<double>::Constant(3, 1.0 / 3.0);
  CHECK((chain.step(pi) - pi * p).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("normalize rejects bad input") {
  const auto chain = normalize(single_row({1, 2}, ChainMode::edge_confidence), NormMode::complement);
  CHECK_THROWS_AS(normalize(chain, NormMode::complement), std::invalid_argument);
  CHECK_THROWS_AS(normalize(single_row({1, -2}, ChainMode::edge_confidence), NormMode::complement),
                  std::invalid_argument);
}

TEST_CASE("normalized random chains are row-stochastic") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g1 = random_ontology(seed, {9, 4, 0, 3});
    const auto g2 = synth_mutate(g1, seed, {MutationKind::label_edit, 0.0}).graph;
    for (const auto mode : {ChainMode::edge_confidence, ChainMode::baseline_sf}) {
      const auto upmc = build_upmc<double>(g1, g2, {}, mode);
      for (const auto norm : {NormMode::formula, NormMode::complement}) {
        CHECK(is_row_stochastic(normalize(upmc, norm)));
        const auto pi0 = initial_distribution(upmc, g1, g2, {});
        CHECK(is_row_stochastic(normalize(upmc, norm, std::optional(pi0))));
      }
    }
  }
}

TEST_CASE("ergodic transform") {
  Eigen::Matrix2d flip;
  flip << 0, 1, 1, 0;
  const auto damped = ergodic_transform(chain_from_matrix(flip, true), 0.5);
  CHECK(Eigen::MatrixXd(damped.transitions()).isApprox(Eigen::MatrixXd::Constant(2, 2, 0.5)));

  const auto same = ergodic_transform(chain_from_matrix(flip, true), 1.0);
  CHECK(Eigen::MatrixXd(same.transitions()) == Eigen::MatrixXd(flip));

  const Eigen::Matrix3d identity = Eigen::Matrix3d::Identity();
  for (const double a : {0.1, 0.5, 0.99}) {
    const auto still = ergodic_transform(chain_from_matrix(identity, true), a);
    CHECK(Eigen::MatrixXd(still.transitions()).isApprox(Eigen::MatrixXd(identity)));
  }

  CHECK_THROWS_AS(ergodic_transform(chain_from_matrix(flip, true), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ergodic_transform(chain_from_matrix(flip, true), 1.5), std::invalid_argument);
  CHECK_THROWS_AS(ergodic_transform(chain_from_matrix(flip, false), 0.5), std::invalid_argument);
}

TEST_CASE("ergodic transform scales the restart term") {
  const auto raw = single_row({2, 4}, ChainMode::edge_confidence);
  const Distribution<double> restart = Distribution<double>::Ones(3);
  const auto chain = normalize(raw, NormMode::complement, std::optional(restart));
  const auto damped = ergodic_transform(chain, 0.85);
  CHECK(is_row_stochastic(damped));
  const Eigen::MatrixXd expected = 0.85 * chain.dense() + 0.15 * Eigen::MatrixXd::Identity(3, 3);
  CHECK(damped.dense().isApprox(expected));
}

TEST_CASE("initial distribution") {
  OntologyGraph one;
  one.add_term("x", "Thing");
  CHECK(initial_distribution(build_upmc<double>(one, one, {}, ChainMode::edge_confidence), one, one, {}) ==
        Distribution<double>::Ones(1));

  // sigma("ab", "ab") = 1 and sigma("ab", "xyxy") = 1/4.
  OntologyGraph left, right;
  left.add_term("x", "ab");
  right.add_term("y", "ab");
  right.add_term("z", "xyxy");
  const auto pi = initial_distribution(build_upmc<double>(left, right, {}, ChainMode::edge_confidence), left, right, {});
  CHECK(pi(0) == doctest::Approx(0.8));
  CHECK(pi(1) == doctest::Approx(0.2));
}

TEST_CASE("restart transform") {
  Eigen::Matrix2d flip;
  flip << 0, 1, 1, 0;
  const Distribution<double> r = Eigen::RowVector2d(3, 1);
  const auto chain = restart_transform(chain_from_matrix(flip, true), 0.8, r);
  CHECK(is_row_stochastic(chain));
  Eigen::Matrix2d expected;
  expected << 0.15, 0.85, 0.95, 0.05;
  CHECK(chain.dense().isApprox(Eigen::MatrixXd(expected)));

  // Dangling rows keep jumping to the same distribution.
  const auto raw = single_row({2, 4}, ChainMode::edge_confidence);
  const Distribution<double> prior = Eigen::RowVector3d(1, 1, 2);
  const auto normalized = normalize(raw, NormMode::complement, std::optional(prior));
  const auto damped = restart_transform(normalized, 0.5, prior);
  CHECK(is_row_stochastic(damped));
  CHECK(damped.dense().row(1).isApprox(Eigen::RowVector3d(0.25, 0.25, 0.5)));
  CHECK(damped.dense().row(0).isApprox(Eigen::RowVector3d(0.125, 0.125 + 1.0 / 3.0, 0.25 + 1.0 / 6.0)));

  CHECK_THROWS_AS(restart_transform(normalized, 0.5, Distribution<double>(Eigen::RowVector3d(1, 0, 0))),
                  std::invalid_argument);
  CHECK_THROWS_AS(restart_transform(raw, 0.5, prior), std::invalid_argument);
  CHECK_THROWS_AS(restart_transform(normalized, 0.0, prior), std::invalid_argument);
}
