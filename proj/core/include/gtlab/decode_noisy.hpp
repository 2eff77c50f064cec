#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "gtlab/decode_noiseless.hpp"
#include "gtlab/model.hpp"
#include "gtlab/noise.hpp"

namespace gtlab {

struct NcompParams {
  double rho = 0.05;
  double delta = 0.1;

  // Delta = 0.1 (1 - 2 rho) / rho.
  static NcompParams simulation_default(double rho);
};

struct NcompResult {
  DefectiveSet estimate;
  std::vector<Item> untested;  // items in no test; reported nondefective
};

NcompResult ncomp(const TestMatrix& X, const OutcomeVector& y, const NcompParams& params);

struct SeparateDecodingParams {
  double gamma = 0.0;  // bits
  double design_p = 0.1;
  std::size_t k = 1;

  // gamma = log2((n - k) / delta).
  static SeparateDecodingParams union_bound(std::size_t n, std::size_t k, double p, double delta);
  // gamma = (1 - delta) T I_1.
  static SeparateDecodingParams information(const NoiseModel& model, std::size_t T, std::size_t k,
                                            double p, double delta);
};

// Single-test laws for a defective item U = 1 under Bernoulli(p) columns and
// an only-defects-matter model, indexed by outcome value (0, 1, 2 = '?'):
//   conditional[y][x] = P(Y = y | X_i = x, U_i = 1)
//                     = sum_j Bin(k-1, p)(j) p(y | j + x)
//   marginal[y]       = P(Y = y) = sum_j Bin(k, p)(j) p(y | j)
struct SeparateLikelihoods {
  std::array<std::array<double, 2>, 3> conditional{};
  std::array<double, 3> marginal{};
};

// Throws UnsupportedModel for models where the test size matters.
SeparateLikelihoods separate_likelihoods(const NoiseModel& model, double p, std::size_t k);

std::vector<double> binomial_pmf(std::size_t n, double p);

// Throws UnsupportedModel for models where the test size matters.
DefectiveSet separate_decode(const TestMatrix& X, const OutcomeVector& y, const NoiseModel& model,
                             const SeparateDecodingParams& params);

struct NddParams {
  double gamma1 = 0.175;
  double gamma2 = 0.175;
  double nu = 0.6931471805599453;
  std::size_t k = 1;
};

DefectiveSet ndd(const TestMatrix& X, const OutcomeVector& y, const NddParams& params);

struct NoisyLpParams {
  double zeta = 0.5;
  enum class Rounding { nearest, strict_positive } rounding = Rounding::nearest;
  bool pin_negative_slack = false;  // Z channel / dilution: negative tests trusted
  bool pin_positive_slack = false;  // addition noise: positive tests trusted
};

// Objective includes zeta times the slack total; z has length n.
LpSolution noisy_lp_solve(const TestMatrix& X, const OutcomeVector& y, const NoisyLpParams& params);
DefectiveSet noisy_lp(const TestMatrix& X, const OutcomeVector& y, const NoisyLpParams& params = {});

struct BpModel {
  enum class Kind { symmetric, addition_dilution } kind = Kind::symmetric;
  double rho = 0.0;
  double phi = 0.0;
  double theta = 0.0;

  static BpModel symmetric(double rho) { return {Kind::symmetric, rho, 0.0, 0.0}; }
  static BpModel addition_dilution(double phi, double theta) {
    return {Kind::addition_dilution, 0.0, phi, theta};
  }
  // Throws UnsupportedModel for kinds BP has no message form for.
  static BpModel from_noise(const NoiseModel& model);
};

struct BpParams {
  std::size_t iterations = 10;
  double prior_q = 0.02;
  BpModel model;
  bool top_k = false;  // pick the k largest marginals instead of thresholding
  std::size_t k = 0;
};

struct BpResult {
  DefectiveSet estimate;
  std::vector<double> marginals;  // estimated P(u_i = 1 | y)
};

BpResult bp_decode(const TestMatrix& X, const OutcomeVector& y, const BpParams& params);

struct ErasureResult {
  DefectiveSet estimate;
  bool degenerate = false;  // every test was erased
};

ErasureResult erasure_wrap(const TestMatrix& X, const OutcomeVector& y, NoiselessDecoder inner,
                           std::size_t sss_cap = kDefaultSssCap);

}  // namespace gtlab
