#pragma once

#include <cstddef>

#include "gtlab/model.hpp"
#include "gtlab/rng.hpp"

namespace gtlab {

enum class DesignKind { bernoulli, near_constant_column, individual };

struct DesignParams {
  DesignKind kind = DesignKind::bernoulli;
  double nu = 1.0;            // p = nu / k for Bernoulli, L = round(nu T / k) for NCC
  std::size_t k_nominal = 1;
};

// Entries i.i.d. Bernoulli(p). Dense p is sampled 64 cells per step, sparse
// p by jumping between ones; the two give different streams for one seed.
inline constexpr double kBitslicedMinP = 0.25;
TestMatrix sample_bernoulli_design(std::size_t n, std::size_t T, double p, Rng& rng);

// Each column places L draws uniformly with replacement among the T tests.
TestMatrix sample_ncc_design(std::size_t n, std::size_t T, std::size_t L, Rng& rng);

TestMatrix individual_testing_design(std::size_t n);

// round(nu * T / k), never below 1.
std::size_t ncc_draws(double nu, std::size_t T, std::size_t k);

// Dispatch on params.kind; T is ignored for individual testing (T = n).
TestMatrix sample_design(const DesignParams& params, std::size_t n, std::size_t T, Rng& rng);

}  // namespace gtlab
