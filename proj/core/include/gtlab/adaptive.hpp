#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gtlab/model.hpp"
#include "gtlab/noise.hpp"
#include "gtlab/rng.hpp"

namespace gtlab {

struct TranscriptEntry {
  std::vector<Item> pool;
  Outcome outcome = Outcome::negative;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

// Answers pooled tests for an adaptive algorithm and counts them.
class TestOracle {
 public:
  virtual ~TestOracle() = default;

  Outcome test(std::span<const Item> pool);

  std::size_t tests_used() const { return tests_; }
  void record_transcript(bool on) { recording_ = on; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

 protected:
  virtual Outcome evaluate(std::span<const Item> pool) = 0;

 private:
  std::size_t tests_ = 0;
  bool recording_ = false;
  std::vector<TranscriptEntry> transcript_;
};

// Hidden defective set plus an optional noise model. The set is never
// exposed through the oracle interface.
class HiddenSetOracle final : public TestOracle {
 public:
  HiddenSetOracle(std::size_t n, DefectiveSet hidden, NoiseModel model = {}, std::uint64_t seed = 0);

 protected:
  Outcome evaluate(std::span<const Item> pool) override;

 private:
  std::vector<char> defective_;
  NoiseModel model_;
  Rng rng_;
};

// Replays a recorded transcript; throws std::runtime_error if the algorithm
// asks for a different pool than the one recorded.
class TranscriptOracle final : public TestOracle {
 public:
  explicit TranscriptOracle(std::vector<TranscriptEntry> entries);

 protected:
  Outcome evaluate(std::span<const Item> pool) override;

 private:
  std::vector<TranscriptEntry> entries_;
  std::size_t next_ = 0;
};

void write_transcript_jsonl(std::ostream& out, const std::vector<TranscriptEntry>& entries);
std::vector<TranscriptEntry> read_transcript_jsonl(std::istream& in);

struct AdaptiveResult {
  DefectiveSet recovered;
  std::size_t tests_used = 0;
  std::size_t stages = 0;
};

// Repeated binary splitting on the untested remainder; tests used at most
// k (ceil(log2 n) + 1) + 1.
AdaptiveResult binary_split_find_all(TestOracle& oracle, std::size_t n);

// Binary search for one defective inside a pool known to be positive.
// Items shown nondefective along the way are appended to `cleared`.
Item binary_split_find_one(TestOracle& oracle, std::span<const Item> pool,
                           std::vector<Item>* cleared = nullptr);

// k near-equal subsets of size at most ceil(n/k), each searched by binary
// splitting; stops as soon as k defectives are found.
AdaptiveResult hwang_split(TestOracle& oracle, std::size_t n, std::size_t k);

// Groups of ceil(sqrt(n/k)), then individual tests inside positive groups.
AdaptiveResult dorfman(TestOracle& oracle, std::size_t n, std::size_t k);

// Groups of 2^s items from an unresolved pool; a positive group yields its
// first defective by splitting and clears the items before it.
AdaptiveResult generalized_split_linear(TestOracle& oracle, std::size_t n, unsigned s);

struct CountResult {
  std::size_t count = 0;
  std::size_t tests_used = 0;
  std::size_t stages = 0;
};

// Repetitions per set in the counting procedure: ceil(c log2 n).
std::size_t cheng_repetitions(std::size_t n, double c);

// Exact adaptive counting by random halving.
CountResult cheng_count(TestOracle& oracle, std::size_t n, double c, Rng& rng);

struct CountEstimate {
  double value = 0.0;  // +infinity when no pool was negative
  bool saturated = false;
  std::size_t tests_used = 0;
  std::size_t last_negative = 0;  // t*, 1-based; 0 if none
};

// Number of nonadaptive tests: the smallest T with b^T >= n.
std::size_t damaschke_num_tests(std::size_t n, double b);
// p_t = 1 - (1 - 1/n)^{b^t} for t = 1..T.
std::vector<double> damaschke_probabilities(std::size_t n, double b);
// Pool t includes each item independently with probability p_t.
TestMatrix damaschke_design(std::size_t n, double b, Rng& rng);
// k_hat = -1 / (b^{t* - s} log2(1 - 1/n)) from pool outcomes in t order.
CountEstimate damaschke_estimate(const OutcomeVector& y, std::size_t n, double b, double s);
// Draws the pools, queries the oracle once per pool, then estimates.
CountEstimate damaschke_estimate(TestOracle& oracle, std::size_t n, double b, double s, Rng& rng);

}  // namespace gtlab
