#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gtlab/designs.hpp"
#include "test_support.hpp"

using namespace gtlab;
using namespace gtlab::testing;

namespace {

std::vector<double> binomial_cdf(std::size_t T, double p) {
  std::vector<double> pmf(T + 1);
  for (std::size_t j = 0; j <= T; ++j)
    pmf[j] = std::exp(std::lgamma(T + 1.0) - std::lgamma(j + 1.0) - std::lgamma(T - j + 1.0) +
                      static_cast<double>(j) * std::log(p) + static_cast<double>(T - j) * std::log1p(-p));
  std::vector<double> cdf(T + 1);
  double s = 0.0;
  for (std::size_t j = 0; j <= T; ++j) cdf[j] = (s += pmf[j]);
  return cdf;
}

// Kolmogorov-Smirnov distance between observed column weights and
// Binomial(T, p); the 1% critical value is about 1.63 / sqrt(N).
double ks_column_weights(std::size_t n, std::size_t T, double p, std::size_t matrices, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> hist(T + 1, 0);
  std::size_t N = 0;
  for (std::size_t r = 0; r < matrices; ++r) {
    const TestMatrix X = sample_bernoulli_design(n, T, p, rng);
    for (std::size_t i = 0; i < n; ++i, ++N) hist[X.column_weight(i)]++;
  }
  const auto cdf = binomial_cdf(T, p);
  double acc = 0.0, d = 0.0;
  for (std::size_t j = 0; j <= T; ++j) {
    acc += static_cast<double>(hist[j]);
    d = std::max(d, std::abs(acc / static_cast<double>(N) - cdf[j]));
  }
  return d * std::sqrt(static_cast<double>(N));
}

}  // namespace

TEST(Bernoulli, Extremes) {
  Rng rng(1);
  const TestMatrix Z = sample_bernoulli_design(70, 9, 0.0, rng);
  for (std::size_t t = 0; t < 9; ++t) EXPECT_EQ(Z.row_weight(t), 0u);
  const TestMatrix O = sample_bernoulli_design(70, 9, 1.0, rng);
  for (std::size_t t = 0; t < 9; ++t) EXPECT_EQ(O.row_weight(t), 70u);
  for (std::size_t i = 0; i < 70; ++i) EXPECT_EQ(O.column_weight(i), 9u);
  EXPECT_THROW(sample_bernoulli_design(5, 5, 1.1, rng), std::invalid_argument);
  EXPECT_THROW(sample_bernoulli_design(5, 5, -0.1, rng), std::invalid_argument);
}

TEST(Bernoulli, MeanColumnWeightAtSimulationSetup) {
  Rng rng(2);
  double total = 0.0;
  for (int r = 0; r < 1000; ++r) {
    const TestMatrix X = sample_bernoulli_design(500, 300, 1.0 / 11, rng);
    for (std::size_t i = 0; i < 500; ++i) total += static_cast<double>(X.column_weight(i));
  }
  EXPECT_NEAR(total / (1000.0 * 500), 300.0 / 11, 1.0);
  // Much tighter than the required tolerance: the standard error is ~0.007.
  EXPECT_NEAR(total / (1000.0 * 500), 300.0 / 11, 0.05);
}

// One case per sampling path: bit-sliced, guided-table skip, logarithmic skip.
TEST(Bernoulli, ColumnWeightsAreBinomial) {
  EXPECT_LT(ks_column_weights(500, 60, 1.0 / 11, 20, 3), 1.63);
  EXPECT_LT(ks_column_weights(300, 40, 0.3, 30, 4), 1.63);
  EXPECT_LT(ks_column_weights(97, 33, 0.5, 100, 5), 1.63);
  EXPECT_LT(ks_column_weights(400, 900, 0.01, 20, 6), 1.63);
  EXPECT_LT(ks_column_weights(1000, 5000, 0.0005, 10, 7), 1.63);
}

TEST(Bernoulli, AdjacentCellsIndependent) {
  // Pairs of horizontally adjacent cells and the pair (last of row, first of
  // next row) must each be jointly 1 with probability p^2.
  for (double p : {0.05, 0.3}) {
    Rng rng(8);
    const std::size_t n = 37, T = 50;
    double same_row = 0, across = 0, cells = 0, boundaries = 0;
    for (int r = 0; r < 400; ++r) {
      const TestMatrix X = sample_bernoulli_design(n, T, p, rng);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i + 1 < n; ++i, ++cells) same_row += X.contains(t, i) && X.contains(t, i + 1);
        if (t + 1 < T) {
          across += X.contains(t, n - 1) && X.contains(t + 1, 0);
          ++boundaries;
        }
      }
    }
    const double p2 = p * p;
    EXPECT_NEAR(same_row / cells, p2, 4 * std::sqrt(p2 / cells));
    EXPECT_NEAR(across / boundaries, p2, 4 * std::sqrt(p2 / boundaries));
  }
}

TEST(GeometricSkip, MatchesGeometricLaw) {
  // P(G = m) = q^m p; chi-square over m < 40 plus a tail bin.
  for (double p : {1.0 / 11, 0.2, 0.003}) {
    const GeometricSkip skip(p);
    Rng rng(9);
    std::uint64_t word = 0;
    bool half = false;
    auto next32 = [&]() -> std::uint32_t {
      if (half) {
        half = false;
        return static_cast<std::uint32_t>(word >> 32);
      }
      word = rng();
      half = true;
      return static_cast<std::uint32_t>(word);
    };
    const std::size_t bins = 40, draws = 200000;
    for (int variant = 0; variant < 2; ++variant) {
      std::vector<double> count(bins + 1, 0.0);
      for (std::size_t d = 0; d < draws; ++d) {
        const std::uint64_t g = variant == 0 ? skip(rng) : skip.draw32(next32);
        count[std::min<std::uint64_t>(g, bins)] += 1;
      }
      double chi = 0.0;
      const double q = 1.0 - p;
      for (std::size_t m = 0; m <= bins; ++m) {
        const double prob = m < bins ? std::pow(q, m) * p : std::pow(q, bins);
        const double e = prob * draws;
        chi += (count[m] - e) * (count[m] - e) / e;
      }
      // 40 dof, 0.1% critical value 73.40.
      EXPECT_LT(chi, 73.40) << "p=" << p << " variant=" << variant;
    }
  }
}

TEST(Ncc, SingleDrawGivesWeightOne) {
  Rng rng(10);
  const TestMatrix X = sample_ncc_design(200, 17, 1, rng);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(X.column_weight(i), 1u);
  EXPECT_THROW(sample_ncc_design(5, 0, 1, rng), std::invalid_argument);
  EXPECT_THROW(sample_ncc_design(5, 5, 0, rng), std::invalid_argument);
}

TEST(Ncc, DistinctTestsPerColumn) {
  Rng rng(11);
  double total = 0.0;
  std::size_t columns = 0, max_weight = 0;
  for (int r = 0; r < 100; ++r) {
    const TestMatrix X = sample_ncc_design(100, 100, 10, rng);
    for (std::size_t i = 0; i < 100; ++i, ++columns) {
      total += static_cast<double>(X.column_weight(i));
      max_weight = std::max(max_weight, X.column_weight(i));
    }
  }
  const double expected = 100.0 * (1.0 - std::pow(0.99, 10));
  EXPECT_NEAR(expected, 9.562, 1e-3);
  EXPECT_NEAR(total / static_cast<double>(columns), expected, 0.05);
  EXPECT_LE(max_weight, 10u);
}

TEST(Ncc, DrawsRule) {
  EXPECT_EQ(ncc_draws(std::numbers::ln2, 150, 10), 10u);   // 10.397
  EXPECT_EQ(ncc_draws(std::numbers::ln2, 100, 10), 7u);    // 6.93
  EXPECT_EQ(ncc_draws(std::numbers::ln2, 5, 10), 1u);      // 0.35 clamps to 1
  EXPECT_THROW(ncc_draws(0.0, 100, 10), std::invalid_argument);
  EXPECT_THROW(ncc_draws(0.7, 100, 0), std::invalid_argument);
  for (std::size_t T = 1; T <= 800; ++T) {
    const double exact = std::numbers::ln2 * static_cast<double>(T) / 10;
    EXPECT_LE(std::abs(static_cast<double>(ncc_draws(std::numbers::ln2, T, 10)) - std::max(1.0, exact)), 0.5 + 1e-12);
  }
}

TEST(Individual, IdentityAndOutcomes) {
  const TestMatrix X = individual_testing_design(3);
  EXPECT_EQ(X, TestMatrix::from_rows({"100", "010", "001"}));
  EXPECT_EQ(noiseless_outcomes(individual_testing_design(5), {1, 4}), outcomes_from("01001"));
  EXPECT_THROW(individual_testing_design(0), std::invalid_argument);
}

TEST(Individual, RateApproachesEntropy) {
  const double beta = 0.1;
  const double h = -beta * std::log2(beta) - (1 - beta) * std::log2(1 - beta);
  const std::size_t n = 100000;
  EXPECT_NEAR(rate(n, static_cast<std::size_t>(beta * n), n), h, 1e-3);
}

TEST(SampleDesign, DispatchesOnKind) {
  Rng a(12), b(12);
  DesignParams params{DesignKind::bernoulli, 1.0, 10};
  EXPECT_EQ(sample_design(params, 50, 20, a), sample_bernoulli_design(50, 20, 0.1, b));
  params = {DesignKind::near_constant_column, std::numbers::ln2, 10};
  EXPECT_EQ(sample_design(params, 50, 30, a), sample_ncc_design(50, 30, 2, b));
  params = {DesignKind::individual, 1.0, 1};
  EXPECT_EQ(sample_design(params, 6, 6, a), TestMatrix::identity(6));
}

TEST(Designs, ReproducibleForFixedSeed) {
  Rng a(77), b(77);
  EXPECT_EQ(sample_bernoulli_design(300, 120, 1.0 / 11, a), sample_bernoulli_design(300, 120, 1.0 / 11, b));
  EXPECT_EQ(sample_ncc_design(300, 120, 8, a), sample_ncc_design(300, 120, 8, b));
}
