#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gtlab/noise.hpp"

namespace gtlab {

enum class RateFormulaId {
  comp_bern,
  dd_bern,
  sss_bern_bound,
  bern_capacity,
  comp_ncc,
  dd_ncc,
  ncc_capacity,
  ncomp_rate,
  symm_capacity_small_alpha,
  erasure_dd,
  addition_comp,
  separate_noiseless_limit,
  separate_symm_limit,
  individual_linear,
};

struct BoundResult {
  enum class Kind { achievable, converse };
  double value = 0.0;
  Kind kind = Kind::achievable;
};

// Channel parameters used by the noisy entries of the catalog.
struct RateModelParams {
  double rho = 0.0;
  double phi = 0.0;
  double xi = 0.0;
};

const std::vector<RateFormulaId>& all_rate_formulas();
std::string to_string(RateFormulaId id);
RateFormulaId parse_rate_formula(const std::string& id);  // std::invalid_argument if unknown
std::string to_string(BoundResult::Kind kind);

// x is the sparsity exponent alpha, or beta for individual_linear.
BoundResult theoretical_rate(RateFormulaId id, double x, const RateModelParams& params = {});

// Binary entropy in bits; h(0) = h(1) = 0.
double binary_entropy(double x);

// Maximizes a function on [lo, hi]: coarse grid, then golden-section search
// around the best grid point down to tol.
double maximize_1d(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10,
                   double* argmax = nullptr);

// min(1, 2^T / C(n,k)).
double counting_bound_success(std::size_t n, std::size_t k, std::size_t T);

// sum_{l=0}^{k} (-1)^l C(k,l) (1 - l q)^T; requires k q <= 1.
double phi_k(std::size_t k, double q, std::size_t T);

// Exact COMP success probability under a Bernoulli(p) design.
double comp_exact_success(std::size_t n, std::size_t k, double p, std::size_t T);

// 1 - k (1-r)^T + (k^2/2)(1-2r)^T with r = p (1-p)^{k-1}, clipped to [0, 1].
double sss_success_upper_bound(std::size_t n, std::size_t k, double p, std::size_t T);

// I(X_{0,tau}; Y | X_{1,tau}) in bits for one test: tau defective columns
// against the remaining k - tau, all entries i.i.d. Bernoulli(p). Exact
// enumeration over defective counts; k <= 30.
double mutual_info_exact(const NoiseModel& model, double p, std::size_t k, std::size_t tau);

// Noiseless closed form (1-p)^{k-tau} h((1-p)^tau).
double mutual_info_noiseless_closed_form(double p, std::size_t k, std::size_t tau);

// I_1 = I(X_1; Y) in bits for one defective column against k - 1 others.
double single_item_mutual_info(const NoiseModel& model, double p, std::size_t k);

// I_max = max over p of I(X_K; Y); the maximizing p is written to argmax_p.
double max_mutual_info(const NoiseModel& model, std::size_t k, double* argmax_p = nullptr);

// log2 C(n,k) / I_max: tests needed by any nonadaptive design.
double converse_tests_general(std::size_t n, std::size_t k, const NoiseModel& model);

struct LinearRegimeTests {
  double worst_case_per_n = 0.0;
  double average_per_n = 0.0;
};

// Generalized binary splitting with groups of m = 2^s at defective fraction beta.
LinearRegimeTests linear_regime_tests(double beta, unsigned s);

}  // namespace gtlab
