#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "gtlab/designs.hpp"
#include "gtlab/noise.hpp"
#include "test_support.hpp"

using namespace gtlab;
using namespace gtlab::testing;

namespace {

std::vector<NoiseModel> all_models() {
  return {NoiseModel::noiseless(),      NoiseModel::symmetric(0.05), NoiseModel::addition(0.1),
          NoiseModel::dilution(0.3),    NoiseModel::z_channel(0.2),  NoiseModel::erasure(0.25),
          NoiseModel::threshold(0.25, 0.75)};
}

double p(const NoiseModel& m, Outcome y, std::size_t size, std::size_t l) {
  return transition_probability(m, y, size, l);
}

}  // namespace

TEST(Transition, NoiselessTable) {
  const auto m = NoiseModel::noiseless();
  EXPECT_EQ(p(m, Outcome::positive, 5, 0), 0.0);
  for (std::size_t l = 1; l <= 5; ++l) EXPECT_EQ(p(m, Outcome::positive, 5, l), 1.0);
}

TEST(Transition, ClosedForms) {
  EXPECT_DOUBLE_EQ(p(NoiseModel::dilution(0.5), Outcome::positive, 7, 2), 0.75);
  EXPECT_DOUBLE_EQ(p(NoiseModel::threshold(0.25, 0.75), Outcome::positive, 4, 2), 0.5);
  EXPECT_DOUBLE_EQ(p(NoiseModel::symmetric(0.1), Outcome::positive, 3, 0), 0.1);
  EXPECT_DOUBLE_EQ(p(NoiseModel::symmetric(0.1), Outcome::positive, 3, 2), 0.9);
  EXPECT_DOUBLE_EQ(p(NoiseModel::addition(0.2), Outcome::positive, 3, 0), 0.2);
  EXPECT_DOUBLE_EQ(p(NoiseModel::addition(0.2), Outcome::positive, 3, 1), 1.0);
  EXPECT_DOUBLE_EQ(p(NoiseModel::z_channel(0.2), Outcome::positive, 3, 3), 0.8);
  EXPECT_DOUBLE_EQ(p(NoiseModel::z_channel(0.2), Outcome::positive, 3, 0), 0.0);
  EXPECT_DOUBLE_EQ(p(NoiseModel::erasure(0.3), Outcome::erased, 3, 1), 0.3);
  EXPECT_DOUBLE_EQ(p(NoiseModel::erasure(0.3), Outcome::positive, 3, 1), 0.7);
  EXPECT_DOUBLE_EQ(p(NoiseModel::erasure(0.3), Outcome::negative, 3, 0), 0.7);
}

TEST(Transition, ThresholdBoundariesAreWeak) {
  const auto m = NoiseModel::threshold(0.25, 0.75);
  EXPECT_EQ(p(m, Outcome::positive, 4, 3), 1.0);  // l/m = 0.75 counts as positive
  EXPECT_EQ(p(m, Outcome::positive, 4, 1), 0.0);  // l/m = 0.25 counts as negative
  EXPECT_EQ(p(m, Outcome::positive, 4, 0), 0.0);
  EXPECT_EQ(p(m, Outcome::positive, 0, 0), 0.0);
  EXPECT_EQ(p(NoiseModel::threshold(0.5, 0.5), Outcome::positive, 4, 2), 1.0);
}

TEST(Transition, Errors) {
  EXPECT_THROW(p(NoiseModel::symmetric(0.1), Outcome::erased, 3, 1), std::invalid_argument);
  EXPECT_THROW(p(NoiseModel::noiseless(), Outcome::positive, 2, 3), std::invalid_argument);
  EXPECT_THROW(NoiseModel::symmetric(1.5), std::invalid_argument);
  EXPECT_THROW(NoiseModel::threshold(0.8, 0.2), std::invalid_argument);
  EXPECT_THROW(parse_noise_kind("gaussian"), std::invalid_argument);
  EXPECT_EQ(parse_noise_kind("z"), NoiseKind::z);
}

TEST(Transition, Normalized) {
  for (const auto& model : all_models())
    for (std::size_t m = 0; m <= 20; ++m)
      for (std::size_t l = 0; l <= m; ++l) {
        double s = p(model, Outcome::negative, m, l) + p(model, Outcome::positive, m, l);
        if (model.has_erasures()) s += p(model, Outcome::erased, m, l);
        ASSERT_NEAR(s, 1.0, 1e-15) << model.name() << " m=" << m << " l=" << l;
      }
}

TEST(Transition, OnlyDefectsMatterExactly) {
  for (const auto& model : all_models()) {
    if (!model.only_defects_matter()) continue;
    for (std::size_t l = 0; l <= 10; ++l)
      for (std::size_t m = l; m <= 20; ++m)
        for (auto y : {Outcome::negative, Outcome::positive})
          ASSERT_EQ(p(model, y, m, l), p(model, y, l, l)) << model.name();
  }
  EXPECT_FALSE(NoiseModel::threshold(0.2, 0.4).only_defects_matter());
}

TEST(Transition, ZeroParametersDegenerateToNoiseless) {
  const auto base = NoiseModel::noiseless();
  for (const auto& model : {NoiseModel::symmetric(0), NoiseModel::addition(0), NoiseModel::dilution(0),
                            NoiseModel::erasure(0), NoiseModel::z_channel(0)})
    for (std::size_t m = 0; m <= 12; ++m)
      for (std::size_t l = 0; l <= m; ++l)
        for (auto y : {Outcome::negative, Outcome::positive})
          ASSERT_EQ(p(model, y, m, l), p(base, y, m, l)) << model.name();
}

TEST(Sampling, NoiselessMatchesOr) {
  Rng rng(1);
  const TestMatrix X = sample_bernoulli_design(80, 40, 0.1, rng);
  const DefectiveSet K = sample_defective_set_combinatorial(80, 5, rng);
  EXPECT_EQ(sample_outcomes(X, K, NoiseModel::noiseless(), rng), noiseless_outcomes(X, K));
}

TEST(Sampling, SymmetricFlipRate) {
  Rng rng(2);
  const TestMatrix X = sample_bernoulli_design(200, 500, 0.05, rng);
  const DefectiveSet K = sample_defective_set_combinatorial(200, 6, rng);
  const OutcomeVector truth = noiseless_outcomes(X, K);
  double flips = 0, total = 0;
  for (int r = 0; r < 200; ++r) {
    const OutcomeVector y = sample_outcomes(X, K, NoiseModel::symmetric(0.05), rng);
    for (std::size_t t = 0; t < y.size(); ++t, ++total) flips += y[t] != truth[t];
  }
  EXPECT_EQ(total, 100000);
  EXPECT_NEAR(flips / total, 0.05, 0.005);
}

TEST(Sampling, ErasureFraction) {
  Rng rng(3);
  const TestMatrix X = sample_bernoulli_design(100, 1000, 0.05, rng);
  const DefectiveSet K = sample_defective_set_combinatorial(100, 4, rng);
  const OutcomeVector truth = noiseless_outcomes(X, K);
  double erased = 0, total = 0, wrong = 0;
  for (int r = 0; r < 100; ++r) {
    const OutcomeVector y = sample_outcomes(X, K, NoiseModel::erasure(0.3), rng);
    for (std::size_t t = 0; t < y.size(); ++t, ++total) {
      erased += y[t] == Outcome::erased;
      wrong += y[t] != Outcome::erased && y[t] != truth[t];
    }
  }
  EXPECT_NEAR(erased / total, 0.30, 0.01);
  EXPECT_EQ(wrong, 0);
}

TEST(Sampling, PerTestLawsMatchTable) {
  // Frequency of a positive outcome for tests grouped by (m, l) agrees with
  // the table for the size-dependent threshold model and for dilution.
  for (const auto& model : {NoiseModel::threshold(0.1, 0.3), NoiseModel::dilution(0.4), NoiseModel::addition(0.15)}) {
    Rng rng(4);
    const TestMatrix X = sample_bernoulli_design(60, 300, 0.08, rng);
    const DefectiveSet K = sample_defective_set_combinatorial(60, 8, rng);
    const auto kbits = indicator_bits(K, 60);
    std::vector<double> pos(X.num_tests(), 0.0);
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
      const OutcomeVector y = sample_outcomes(X, K, model, rng);
      for (std::size_t t = 0; t < y.size(); ++t) pos[t] += y[t] == Outcome::positive;
    }
    for (std::size_t t = 0; t < X.num_tests(); ++t) {
      const std::size_t l = bits::count_and(X.row(t), kbits);
      const double expected = p(model, Outcome::positive, X.row_weight(t), l);
      ASSERT_NEAR(pos[t] / reps, expected, 5 * std::sqrt(0.25 / reps) + 1e-12) << model.name() << " t=" << t;
    }
  }
}
