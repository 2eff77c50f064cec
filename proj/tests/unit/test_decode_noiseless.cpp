#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "gtlab/decode_noiseless.hpp"
#include "gtlab/designs.hpp"
#include "gtlab/errors.hpp"
#include "test_support.hpp"

using namespace gtlab;
using namespace gtlab::testing;

namespace {

struct Case {
  TestMatrix X;
  DefectiveSet K;
  OutcomeVector y;
};

Case random_case(Rng& rng, std::size_t n, std::size_t T, std::size_t k, double p) {
  Case c;
  c.X = sample_bernoulli_design(n, T, p, rng);
  c.K = sample_defective_set_combinatorial(n, k, rng);
  c.y = noiseless_outcomes(c.X, c.K);
  return c;
}

// Vertex enumeration of the relaxation over its 7 variables; returns the
// minimum objective and the minimizing vertex (first found).
std::optional<std::pair<double, std::vector<double>>> lp_by_vertices(const TestMatrix& X, const OutcomeVector& y) {
  const std::size_t n = X.num_items();
  std::vector<Eigen::VectorXd> A;
  std::vector<double> b;
  std::vector<bool> eq;
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    X.for_each_in_row(t, [&](std::size_t i) { a[static_cast<Eigen::Index>(i)] = 1.0; });
    A.push_back(a);
    b.push_back(y[t] == Outcome::positive ? 1.0 : 0.0);
    eq.push_back(y[t] == Outcome::negative);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    a[static_cast<Eigen::Index>(i)] = 1.0;
    A.push_back(a);
    b.push_back(0.0);
    eq.push_back(false);
  }
  std::optional<std::pair<double, std::vector<double>>> best;
  const std::size_t m = A.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n) continue;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    Eigen::Index r = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask >> j & 1) {
        M.row(r) = A[j].transpose();
        rhs[r++] = b[j];
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() < static_cast<Eigen::Index>(n)) continue;
    const Eigen::VectorXd z = lu.solve(rhs);
    bool ok = true;
    for (std::size_t j = 0; j < m && ok; ++j) {
      const double v = A[j].dot(z);
      ok = eq[j] ? std::abs(v - b[j]) < 1e-9 : v >= b[j] - 1e-9;
    }
    if (!ok) continue;
    const double obj = z.sum();
    if (!best || obj < best->first - 1e-12) best = {{obj, std::vector<double>(z.data(), z.data() + n)}};
  }
  return best;
}

}  // namespace

TEST(WorkedExample, SatisfyingSets) {
  const auto X = worked_matrix();
  const auto y = worked_outcomes();
  EXPECT_TRUE(is_satisfying(X, y, {1, 3}));
  EXPECT_TRUE(is_satisfying(X, y, {1, 3, 6}));
  EXPECT_FALSE(is_satisfying(X, y, {6}));
  std::vector<DefectiveSet> found;
  for (std::uint64_t mask = 0; mask < 128; ++mask) {
    const auto L = from_mask(mask);
    EXPECT_EQ(is_satisfying(X, y, L), satisfies_by_definition(X, y, L));
    if (is_satisfying(X, y, L)) found.push_back(L);
  }
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0], (DefectiveSet{1, 3}));
  EXPECT_EQ(found[1], (DefectiveSet{1, 3, 6}));
}

TEST(WorkedExample, AllDecoders) {
  const auto X = worked_matrix();
  const auto y = worked_outcomes();
  EXPECT_EQ(comp(X, y), (DefectiveSet{1, 3, 6}));
  EXPECT_EQ(dd(X, y), (DefectiveSet{1, 3}));
  EXPECT_EQ(scomp(X, y), (DefectiveSet{1, 3}));
  EXPECT_EQ(sss_exact(X, y), (DefectiveSet{1, 3}));
  EXPECT_EQ(lp_decode(X, y, LpRounding::strict_positive), (DefectiveSet{1, 3}));
  EXPECT_EQ(lp_decode(X, y, LpRounding::half), (DefectiveSet{1, 3}));
  EXPECT_EQ(ml_oracle(X, y, 2, NoiseModel::noiseless()), (DefectiveSet{1, 3}));
  EXPECT_TRUE(ml_oracle(X, y, 0, NoiseModel::noiseless()).empty());
}

TEST(WorkedExample, LpOptimumIsIntegral) {
  const auto X = worked_matrix();
  const auto y = worked_outcomes();
  const LpSolution sol = lp_relaxation(X, y);
  ASSERT_EQ(sol.status, LpSolution::Status::optimal);
  const auto oracle = lp_by_vertices(X, y);
  ASSERT_TRUE(oracle.has_value());
  EXPECT_NEAR(sol.objective, oracle->first, 1e-9);
  EXPECT_NEAR(sol.objective, 2.0, 1e-9);
  const std::vector<double> expected{0, 1, 0, 1, 0, 0, 0};
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(sol.z[i], expected[i], 1e-9) << i;
    EXPECT_NEAR(oracle->second[i], expected[i], 1e-9) << i;
  }
}

TEST(Dd, ThreeByThreeWithoutNegativeTests) {
  const auto X = TestMatrix::from_rows({"101", "011", "110"});
  const auto y = outcomes_from("111");
  EXPECT_EQ(comp(X, y), (DefectiveSet{0, 1, 2}));
  EXPECT_TRUE(dd(X, y).empty());
  EXPECT_FALSE(is_satisfying(X, y, dd(X, y)));
  EXPECT_EQ(sss_exact(X, y).size(), 2u);
  EXPECT_EQ(sss_exact(X, y), (DefectiveSet{0, 1}));
}

TEST(Identity, ReturnsSupport) {
  const auto X = TestMatrix::identity(6);
  const auto y = outcomes_from("010011");
  const DefectiveSet support{1, 4, 5};
  EXPECT_EQ(comp(X, y), support);
  EXPECT_EQ(dd(X, y), support);
  EXPECT_EQ(scomp(X, y), support);
  EXPECT_EQ(sss_exact(X, y), support);
  EXPECT_EQ(lp_decode(X, y), support);
}

TEST(Edge, AllNegative) {
  const auto X = worked_matrix();
  const auto y = outcomes_from("00000");
  EXPECT_TRUE(comp(X, y).empty());
  EXPECT_TRUE(dd(X, y).empty());
  EXPECT_TRUE(sss_exact(X, y).empty());
  const auto sol = lp_relaxation(X, y);
  ASSERT_EQ(sol.status, LpSolution::Status::optimal);
  for (double z : sol.z) EXPECT_EQ(z, 0.0);
  EXPECT_TRUE(lp_decode(X, y).empty());
}

TEST(Edge, UntestedItemsStayPossible) {
  // Item 3 appears in no test: COMP keeps it, DD does not.
  const auto X = TestMatrix::from_rows({"1100", "0110"});
  const auto y = outcomes_from("00");
  EXPECT_EQ(comp(X, y), (DefectiveSet{3}));
  EXPECT_TRUE(dd(X, y).empty());
  EXPECT_TRUE(sss_exact(X, y).empty());
}

TEST(Edge, ErasuresRejected) {
  EXPECT_THROW(comp(worked_matrix(), outcomes_from("01?11")), std::invalid_argument);
  EXPECT_THROW(dd(worked_matrix(), outcomes_from("0101")), std::invalid_argument);
}

TEST(Scomp, SingleItemExplainsEverything) {
  // DD finds nothing (every positive test has two PDs) but item 0 explains
  // all positives, so the greedy step picks it first.
  const auto X = TestMatrix::from_rows({"110", "101", "111"});
  const auto y = outcomes_from("111");
  EXPECT_TRUE(dd(X, y).empty());
  EXPECT_EQ(scomp(X, y), (DefectiveSet{0}));
}

TEST(Scomp, OutputsSatisfyOnRandomInstances) {
  Rng rng(3);
  for (int rep = 0; rep < 300; ++rep) {
    const Case c = random_case(rng, 60, 30, 1 + uniform_index(rng, 6), 0.08);
    const auto s = scomp(c.X, c.y);
    EXPECT_TRUE(satisfies_by_definition(c.X, c.y, s));
    EXPECT_TRUE(is_subset(dd(c.X, c.y), s));
  }
}

TEST(Sss, CapRaisesResourceLimit) {
  Rng rng(4);
  const auto X = sample_bernoulli_design(200, 20, 0.05, rng);
  const auto y = noiseless_outcomes(X, sample_defective_set_combinatorial(200, 10, rng));
  EXPECT_GT(comp(X, y).size(), 40u);
  EXPECT_THROW(sss_exact(X, y), ResourceLimitError);
  EXPECT_THROW(sss_exact(X, y, 5), ResourceLimitError);
}

TEST(Sss, NoSatisfyingSetIsAnError) {
  // The positive test contains only an item cleared by a negative test.
  const auto X = TestMatrix::from_rows({"10", "10"});
  EXPECT_THROW(sss_exact(X, outcomes_from("01")), std::invalid_argument);
}

TEST(Oracles, SssMatchesExhaustiveSearch) {
  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 4 + uniform_index(rng, 11);
    const Case c = random_case(rng, n, 2 + uniform_index(rng, 12), uniform_index(rng, 5), 0.1 + 0.3 * uniform01(rng));
    bool found = false;
    const auto brute = brute_force_sss(c.X, c.y, &found);
    ASSERT_TRUE(found);
    ASSERT_EQ(sss_exact(c.X, c.y), brute) << "rep " << rep;
  }
}

TEST(Oracles, MlMatchesExhaustiveMaximum) {
  Rng rng(6);
  const std::vector<NoiseModel> models{NoiseModel::noiseless(), NoiseModel::symmetric(0.1), NoiseModel::dilution(0.3),
                                       NoiseModel::addition(0.2), NoiseModel::z_channel(0.25),
                                       NoiseModel::threshold(0.2, 0.5)};
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 4 + uniform_index(rng, 11);
    const std::size_t k = uniform_index(rng, std::min<std::size_t>(n, 4) + 1);
    const NoiseModel& model = models[rep % models.size()];
    const TestMatrix X = sample_bernoulli_design(n, 3 + uniform_index(rng, 10), 0.3, rng);
    const DefectiveSet K = sample_defective_set_combinatorial(n, k, rng);
    const OutcomeVector y = sample_outcomes(X, K, model, rng);
    double best = -INFINITY;
    for_each_combination(n, k, [&](const std::vector<Item>& L) {
      best = std::max(best, brute_log_likelihood(X, y, L, model));
    });
    DefectiveSet first;
    bool have = false;
    for_each_combination(n, k, [&](const std::vector<Item>& L) {
      if (have) return;
      const double ll = brute_log_likelihood(X, y, L, model);
      if (ll == best || (std::isfinite(best) && ll >= best - 1e-9 * std::max(1.0, std::abs(best)))) {
        first = DefectiveSet::from_sorted(L);
        have = true;
      }
    });
    ASSERT_TRUE(have);
    const auto got = ml_oracle(X, y, k, model);
    ASSERT_EQ(got.size(), k);
    ASSERT_EQ(got, first) << "rep " << rep << " " << model.name();
  }
}

TEST(Ml, ResourceLimit) {
  const TestMatrix X = TestMatrixBuilder(3, 100).build();
  EXPECT_THROW(ml_oracle(X, outcomes_from("000"), 10, NoiseModel::noiseless()), ResourceLimitError);
}

TEST(Guarantees, RandomizedSweep) {
  Rng rng(7);
  int dd_success = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 20 + uniform_index(rng, 80);
    const std::size_t k = 1 + uniform_index(rng, 5);
    const Case c = random_case(rng, n, 5 + uniform_index(rng, 40), k, 1.0 / (k + 1));
    const auto C = comp(c.X, c.y);
    const auto D = dd(c.X, c.y);
    const auto S = scomp(c.X, c.y);
    const auto L = lp_decode(c.X, c.y);
    const auto H = lp_decode(c.X, c.y, LpRounding::half);
    ASSERT_TRUE(is_subset(c.K, C));  // COMP: no false negatives
    ASSERT_TRUE(is_subset(D, c.K));  // DD: no false positives
    ASSERT_TRUE(is_subset(D, C));
    ASSERT_TRUE(is_subset(D, S));
    ASSERT_TRUE(satisfies_by_definition(c.X, c.y, C));
    ASSERT_TRUE(satisfies_by_definition(c.X, c.y, S));
    ASSERT_TRUE(satisfies_by_definition(c.X, c.y, L));
    if (D == c.K) {
      ++dd_success;
      ASSERT_EQ(S, c.K);
      ASSERT_EQ(L, c.K);
      ASSERT_EQ(H, c.K);
    }
    if (satisfies_by_definition(c.X, c.y, D) && C.size() <= 40) {
      ASSERT_EQ(sss_exact(c.X, c.y).size(), D.size());
    }
  }
  EXPECT_GT(dd_success, 200);
}

TEST(Lp, RelaxationBoundsSss) {
  Rng rng(8);
  for (int rep = 0; rep < 500; ++rep) {
    const Case c = random_case(rng, 14, 3 + uniform_index(rng, 10), uniform_index(rng, 5), 0.25);
    const auto sol = lp_relaxation(c.X, c.y);
    ASSERT_EQ(sol.status, LpSolution::Status::optimal);
    EXPECT_LE(sol.objective, static_cast<double>(sss_exact(c.X, c.y).size()) + 1e-8);
    // Feasibility of the returned point within 1e-8.
    for (std::size_t t = 0; t < c.X.num_tests(); ++t) {
      double s = 0.0;
      c.X.for_each_in_row(t, [&](std::size_t i) { s += sol.z[i]; });
      if (c.y[t] == Outcome::positive) EXPECT_GE(s, 1.0 - 1e-8);
      else EXPECT_NEAR(s, 0.0, 1e-8);
    }
    for (double z : sol.z) EXPECT_GE(z, -1e-8);
  }
}

TEST(Lp, RoundingRules) {
  const std::vector<double> z{0.0, 1e-12, 0.3, 0.5, 0.9};
  EXPECT_EQ(round_lp(z, LpRounding::strict_positive), (DefectiveSet{2, 3, 4}));
  EXPECT_EQ(round_lp(z, LpRounding::half), (DefectiveSet{3, 4}));
}

TEST(Dispatch, ParseNames) {
  EXPECT_EQ(parse_noiseless_decoder("lp"), NoiselessDecoder::lp_strict);
  EXPECT_EQ(parse_noiseless_decoder("lp_half"), NoiselessDecoder::lp_half);
  EXPECT_EQ(to_string(NoiselessDecoder::scomp), "scomp");
  EXPECT_THROW(parse_noiseless_decoder("xyz"), std::invalid_argument);
  EXPECT_EQ(decode_noiseless(NoiselessDecoder::comp, worked_matrix(), worked_outcomes()), (DefectiveSet{1, 3, 6}));
}
