#pragma once

#include <cstddef>
#include <vector>

#include "gtlab/model.hpp"
#include "gtlab/rng.hpp"

namespace gtlab {

// Singleton-only SAFFRON. Each bundle is a block of 2m tests; an item placed
// in a bundle occupies the positions of the ones in (b(i), complement b(i)),
// where b(i) is the m-bit binary expansion of i, most significant bit first.
struct SaffronDesign {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t num_bundles = 0;
  std::size_t bits = 0;                            // m = ceil(log2 n)
  std::vector<std::vector<std::size_t>> bundles_of;  // per item, increasing bundle ids

  std::size_t num_tests() const { return 2 * bits * num_bundles; }
};

struct SaffronEncoding {
  SaffronDesign design;
  TestMatrix X;
};

std::size_t saffron_bits(std::size_t n);
// ceil(1.2 e k ln k) bundles for exact recovery.
std::size_t saffron_bundles_exact(std::size_t k);
// ceil(1.2 e k ln(1/gamma)) bundles for recovering a 1 - gamma fraction.
std::size_t saffron_bundles_partial(std::size_t k, double gamma);

// Item membership per bundle is Bernoulli(1/k).
SaffronEncoding saffron_encode(std::size_t n, std::size_t k, std::size_t num_bundles, Rng& rng);

struct SaffronDecodeStats {
  std::size_t outputs_read = 0;
  std::size_t singleton_bundles = 0;
  std::size_t rejected_indices = 0;  // weight-m bundles decoding to an index >= n
};

// Reads only the 2m outputs of each bundle.
DefectiveSet saffron_decode(const SaffronDesign& design, const OutcomeVector& y,
                            SaffronDecodeStats* stats = nullptr);

}  // namespace gtlab
