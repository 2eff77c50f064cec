#include "gtlab/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace gtlab {

Outcome TestOracle::test(std::span<const Item> pool) {
  const Outcome y = evaluate(pool);
  ++tests_;
  if (recording_) transcript_.push_back({std::vector<Item>(pool.begin(), pool.end()), y});
  return y;
}

HiddenSetOracle::HiddenSetOracle(std::size_t n, DefectiveSet hidden, NoiseModel model, std::uint64_t seed)
    : defective_(n, 0), model_(model), rng_(seed) {
  hidden.check_range(n);
  for (Item i : hidden) defective_[i] = 1;
}

Outcome HiddenSetOracle::evaluate(std::span<const Item> pool) {
  std::size_t l = 0;
  for (Item i : pool) {
    if (i >= defective_.size()) throw std::invalid_argument("oracle: item index out of range");
    l += static_cast<std::size_t>(defective_[i]);
  }
  if (model_.kind == NoiseKind::noiseless) return l > 0 ? Outcome::positive : Outcome::negative;
  const std::size_t m = pool.size();
  const double u = uniform01(rng_);
  const double p_erased = model_.has_erasures() ? model_.param : 0.0;
  if (u < p_erased) return Outcome::erased;
  return u - p_erased < transition_probability(model_, Outcome::positive, m, l) ? Outcome::positive
                                                                                 : Outcome::negative;
}

TranscriptOracle::TranscriptOracle(std::vector<TranscriptEntry> entries) : entries_(std::move(entries)) {}

Outcome TranscriptOracle::evaluate(std::span<const Item> pool) {
  if (next_ >= entries_.size()) throw std::runtime_error("transcript oracle: transcript exhausted");
  const auto& e = entries_[next_];
  if (!std::equal(pool.begin(), pool.end(), e.pool.begin(), e.pool.end()))
    throw std::runtime_error("transcript oracle: pool differs from recorded test " + std::to_string(next_));
  ++next_;
  return e.outcome;
}

void write_transcript_jsonl(std::ostream& out, const std::vector<TranscriptEntry>& entries) {
  for (const auto& e : entries) {
    nlohmann::json j;
    j["pool"] = e.pool;
    j["outcome"] = static_cast<int>(e.outcome);
    out << j.dump() << '\n';
  }
}

std::vector<TranscriptEntry> read_transcript_jsonl(std::istream& in) {
  std::vector<TranscriptEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    TranscriptEntry e;
    e.pool = j.at("pool").get<std::vector<Item>>();
    const int o = j.at("outcome").get<int>();
    if (o < 0 || o > 2) throw std::invalid_argument("transcript: outcome must be 0, 1 or 2");
    e.outcome = static_cast<Outcome>(o);
    entries.push_back(std::move(e));
  }
  return entries;
}

Item binary_split_find_one(TestOracle& oracle, std::span<const Item> pool, std::vector<Item>* cleared) {
  if (pool.empty()) throw std::invalid_argument("binary_split_find_one: empty pool");
  std::span<const Item> a = pool;
  while (a.size() > 1) {
    const std::size_t h = (a.size() + 1) / 2;
    auto b = a.first(h);
    if (oracle.test(b) == Outcome::positive) {
      a = b;
    } else {
      if (cleared) cleared->insert(cleared->end(), b.begin(), b.end());
      a = a.subspan(h);
    }
  }
  return a.front();
}

namespace {

// Splits defectives out of `pool` until a test of the remainder is negative,
// the remainder is empty, or `limit` defectives have been found overall.
void split_out_all(TestOracle& oracle, std::vector<Item> pool, std::vector<Item>& found, std::size_t limit) {
  std::vector<Item> cleared;
  while (!pool.empty() && found.size() < limit) {
    if (oracle.test(pool) != Outcome::positive) return;
    cleared.clear();
    const Item d = binary_split_find_one(oracle, pool, &cleared);
    found.push_back(d);
    cleared.push_back(d);
    std::sort(cleared.begin(), cleared.end());
    std::erase_if(pool, [&](Item i) { return std::binary_search(cleared.begin(), cleared.end(), i); });
  }
}

std::vector<Item> iota_items(std::size_t begin, std::size_t end) {
  std::vector<Item> v;
  v.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) v.push_back(static_cast<Item>(i));
  return v;
}

}  // namespace

AdaptiveResult binary_split_find_all(TestOracle& oracle, std::size_t n) {
  const std::size_t start = oracle.tests_used();
  std::vector<Item> found;
  split_out_all(oracle, iota_items(0, n), found, std::numeric_limits<std::size_t>::max());
  AdaptiveResult r;
  r.recovered = DefectiveSet::from_items(std::move(found));
  r.tests_used = oracle.tests_used() - start;
  r.stages = r.tests_used;
  return r;
}

AdaptiveResult hwang_split(TestOracle& oracle, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("hwang_split: k > n");
  const std::size_t start = oracle.tests_used();
  std::vector<Item> found;
  if (k > 0) {
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t begin = 0;
    for (std::size_t g = 0; g < k && found.size() < k; ++g) {
      const std::size_t size = base + (g < extra ? 1 : 0);
      split_out_all(oracle, iota_items(begin, begin + size), found, k);
      begin += size;
    }
  }
  AdaptiveResult r;
  r.recovered = DefectiveSet::from_items(std::move(found));
  r.tests_used = oracle.tests_used() - start;
  r.stages = r.tests_used;
  return r;
}

AdaptiveResult dorfman(TestOracle& oracle, std::size_t n, std::size_t k) {
  const std::size_t start = oracle.tests_used();
  std::size_t g = n;
  if (k > 0) {
    // Smallest g with g^2 >= n / k.
    g = 1;
    while (g * g * k < n) ++g;
  }
  g = std::clamp<std::size_t>(g, 1, std::max<std::size_t>(n, 1));
  std::vector<std::vector<Item>> groups;
  for (std::size_t b = 0; b < n; b += g) groups.push_back(iota_items(b, std::min(n, b + g)));

  std::vector<std::size_t> positive;
  for (std::size_t j = 0; j < groups.size(); ++j)
    if (oracle.test(groups[j]) == Outcome::positive) positive.push_back(j);
  std::vector<Item> found;
  for (std::size_t j : positive)
    for (Item i : groups[j])
      if (oracle.test(std::span<const Item>(&i, 1)) == Outcome::positive) found.push_back(i);

  AdaptiveResult r;
  r.recovered = DefectiveSet::from_sorted(std::move(found));
  r.tests_used = oracle.tests_used() - start;
  r.stages = 2;
  return r;
}

AdaptiveResult generalized_split_linear(TestOracle& oracle, std::size_t n, unsigned s) {
  if (s >= 63) throw std::invalid_argument("generalized_split_linear: s too large");
  const std::size_t start = oracle.tests_used();
  const std::size_t m = std::size_t{1} << s;
  const auto pool = iota_items(0, n);
  std::vector<Item> found;
  std::size_t head = 0;  // pool[head..] is unresolved, in order
  while (head < n) {
    auto group = std::span<const Item>(pool).subspan(head, std::min(m, n - head));
    if (oracle.test(group) == Outcome::negative) {
      head += group.size();
      continue;
    }
    // Everything before the first defective ends up in a negative half.
    const Item d = binary_split_find_one(oracle, group);
    found.push_back(d);
    head = static_cast<std::size_t>(d) + 1;
  }
  AdaptiveResult r;
  r.recovered = DefectiveSet::from_sorted(std::move(found));
  r.tests_used = oracle.tests_used() - start;
  r.stages = r.tests_used;
  return r;
}

std::size_t cheng_repetitions(std::size_t n, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("cheng_count: c must be positive");
  if (n < 2) return 1;
  return static_cast<std::size_t>(std::ceil(c * std::log2(static_cast<double>(n))));
}

CountResult cheng_count(TestOracle& oracle, std::size_t n, double c, Rng& rng) {
  const std::size_t start = oracle.tests_used();
  const std::size_t r = cheng_repetitions(n, c);
  CountResult res;
  auto all = iota_items(0, n);
  if (n > 0 && oracle.test(all) == Outcome::positive) {
    std::vector<std::vector<Item>> pending{std::move(all)};
    std::vector<Item> a1, a2;
    while (!pending.empty()) {
      auto set = std::move(pending.back());
      pending.pop_back();
      if (set.size() == 1) {
        ++res.count;
        continue;
      }
      bool split = false;
      for (std::size_t attempt = 0; attempt < r && !split; ++attempt) {
        a1.clear();
        a2.clear();
        for (Item i : set) (rng() >> 63 ? a1 : a2).push_back(i);
        // An empty half is a negative observation that needs no test.
        if (a1.empty() || oracle.test(a1) == Outcome::negative) continue;
        if (a2.empty() || oracle.test(a2) == Outcome::negative) continue;
        pending.push_back(a1);
        pending.push_back(a2);
        split = true;
      }
      if (!split) ++res.count;
    }
  }
  res.tests_used = oracle.tests_used() - start;
  res.stages = res.tests_used;
  return res;
}

std::size_t damaschke_num_tests(std::size_t n, double b) {
  if (!(b > 1.0)) throw std::invalid_argument("damaschke: base b must exceed 1");
  if (n < 2) throw std::invalid_argument("damaschke: n must be at least 2");
  std::size_t T = 0;
  double power = 1.0;
  while (power < static_cast<double>(n)) {
    power *= b;
    ++T;
  }
  return T;
}

std::vector<double> damaschke_probabilities(std::size_t n, double b) {
  const std::size_t T = damaschke_num_tests(n, b);
  const double l = std::log1p(-1.0 / static_cast<double>(n));
  std::vector<double> p(T);
  for (std::size_t t = 1; t <= T; ++t) p[t - 1] = -std::expm1(std::pow(b, static_cast<double>(t)) * l);
  return p;
}

TestMatrix damaschke_design(std::size_t n, double b, Rng& rng) {
  const auto probs = damaschke_probabilities(n, b);
  TestMatrixBuilder builder(probs.size(), n);
  for (std::size_t t = 0; t < probs.size(); ++t)
    for (std::size_t i = 0; i < n; ++i)
      if (bernoulli(rng, probs[t])) builder.set(t, i);
  return std::move(builder).build();
}

CountEstimate damaschke_estimate(const OutcomeVector& y, std::size_t n, double b, double s) {
  const std::size_t T = damaschke_num_tests(n, b);
  if (y.size() != T)
    throw std::invalid_argument("damaschke_estimate: expected " + std::to_string(T) + " outcomes");
  CountEstimate est;
  est.tests_used = T;
  for (std::size_t t = T; t >= 1; --t) {
    if (y[t - 1] == Outcome::negative) {
      est.last_negative = t;
      break;
    }
  }
  if (est.last_negative == 0) {
    est.saturated = true;
    est.value = std::numeric_limits<double>::infinity();
    return est;
  }
  const double denom = std::pow(b, static_cast<double>(est.last_negative) - s) *
                       std::log2(1.0 - 1.0 / static_cast<double>(n));
  est.value = -1.0 / denom;
  return est;
}

CountEstimate damaschke_estimate(TestOracle& oracle, std::size_t n, double b, double s, Rng& rng) {
  const TestMatrix X = damaschke_design(n, b, rng);
  OutcomeVector y(X.num_tests());
  std::vector<Item> pool;
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    pool.clear();
    X.for_each_in_row(t, [&](std::size_t i) { pool.push_back(static_cast<Item>(i)); });
    y[t] = oracle.test(pool);
  }
  return damaschke_estimate(y, n, b, s);
}

}  // namespace gtlab
