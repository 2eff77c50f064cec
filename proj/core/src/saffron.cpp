#include "gtlab/saffron.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gtlab {

std::size_t saffron_bits(std::size_t n) {
  if (n < 2) throw std::invalid_argument("saffron: n must be at least 2");
  std::size_t m = 0;
  while ((std::size_t{1} << m) < n) ++m;
  return m;
}

std::size_t saffron_bundles_exact(std::size_t k) {
  if (k < 2) return 1;
  const double kd = static_cast<double>(k);
  return static_cast<std::size_t>(std::ceil(1.2 * std::numbers::e * kd * std::log(kd)));
}

std::size_t saffron_bundles_partial(std::size_t k, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("saffron: gamma must lie in (0, 1)");
  const double kd = static_cast<double>(k);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(1.2 * std::numbers::e * kd * std::log(1.0 / gamma))));
}

SaffronEncoding saffron_encode(std::size_t n, std::size_t k, std::size_t num_bundles, Rng& rng) {
  if (num_bundles == 0) throw std::invalid_argument("saffron: need at least one bundle");
  if (k == 0) throw std::invalid_argument("saffron: k must be positive");
  SaffronEncoding enc;
  auto& d = enc.design;
  d.n = n;
  d.k = k;
  d.num_bundles = num_bundles;
  d.bits = saffron_bits(n);
  d.bundles_of.assign(n, {});
  const std::size_t m = d.bits;
  const double p = 1.0 / static_cast<double>(k);

  TestMatrixBuilder b(d.num_tests(), n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t bundle = 0; bundle < num_bundles; ++bundle) {
      if (!bernoulli(rng, p)) continue;
      d.bundles_of[i].push_back(bundle);
      const std::size_t base = 2 * m * bundle;
      for (std::size_t j = 0; j < m; ++j) {
        const bool bit = (i >> (m - 1 - j)) & 1U;
        b.set(base + (bit ? j : m + j), i);
      }
    }
  }
  enc.X = std::move(b).build();
  return enc;
}

DefectiveSet saffron_decode(const SaffronDesign& design, const OutcomeVector& y, SaffronDecodeStats* stats) {
  const std::size_t m = design.bits;
  if (y.size() != design.num_tests())
    throw std::invalid_argument("saffron_decode: expected " + std::to_string(design.num_tests()) + " outcomes");
  SaffronDecodeStats local;
  std::vector<Item> found;
  for (std::size_t bundle = 0; bundle < design.num_bundles; ++bundle) {
    const std::size_t base = 2 * m * bundle;
    std::size_t weight = 0;
    std::size_t index = 0;
    for (std::size_t j = 0; j < 2 * m; ++j) {
      const Outcome o = y[base + j];
      ++local.outputs_read;
      if (o == Outcome::erased) throw std::invalid_argument("saffron_decode: erased outcome");
      const bool one = o == Outcome::positive;
      weight += one;
      if (j < m) index = (index << 1) | static_cast<std::size_t>(one);
    }
    if (weight != m) continue;
    if (index >= design.n) {
      ++local.rejected_indices;
      continue;
    }
    ++local.singleton_bundles;
    found.push_back(static_cast<Item>(index));
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  if (stats) *stats = local;
  return DefectiveSet::from_sorted(std::move(found));
}

}  // namespace gtlab
