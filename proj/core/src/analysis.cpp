#include "gtlab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gtlab/decode_noisy.hpp"
#include "gtlab/errors.hpp"
#include "gtlab/model.hpp"

namespace gtlab {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kLn2 = std::numbers::ln2;
constexpr std::size_t kMaxEnumerationK = 30;

void check_open_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
}

double plogp(double x) {
  return x > 0.0 ? -x * std::log2(x) : 0.0;
}

std::array<double, 3> outcome_law(const NoiseModel& model, std::size_t l) {
  std::array<double, 3> law{};
  law[0] = transition_probability(model, Outcome::negative, l, l);
  law[1] = transition_probability(model, Outcome::positive, l, l);
  if (model.has_erasures()) law[2] = transition_probability(model, Outcome::erased, l, l);
  return law;
}

double entropy(const std::array<double, 3>& law) {
  return plogp(law[0]) + plogp(law[1]) + plogp(law[2]);
}

// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double bernoulli_design_rate(double alpha) {
  // max over nu of min{ h(e^-nu), nu e^-nu / ln2 * (1-alpha)/alpha }
  const double ratio = (1.0 - alpha) / alpha;
  return maximize_1d(
      [&](double nu) {
        return std::min(binary_entropy(std::exp(-nu)), nu * std::exp(-nu) / kLn2 * ratio);
      },
      1e-4, 20.0);
}

}  // namespace

const std::vector<RateFormulaId>& all_rate_formulas() {
  static const std::vector<RateFormulaId> ids = {
      RateFormulaId::comp_bern,     RateFormulaId::dd_bern,
      RateFormulaId::sss_bern_bound, RateFormulaId::bern_capacity,
      RateFormulaId::comp_ncc,      RateFormulaId::dd_ncc,
      RateFormulaId::ncc_capacity,  RateFormulaId::ncomp_rate,
      RateFormulaId::symm_capacity_small_alpha, RateFormulaId::erasure_dd,
      RateFormulaId::addition_comp, RateFormulaId::separate_noiseless_limit,
      RateFormulaId::separate_symm_limit, RateFormulaId::individual_linear,
  };
  return ids;
}

std::string to_string(RateFormulaId id) {
  switch (id) {
    case RateFormulaId::comp_bern: return "comp_bern";
    case RateFormulaId::dd_bern: return "dd_bern";
    case RateFormulaId::sss_bern_bound: return "sss_bern_bound";
    case RateFormulaId::bern_capacity: return "bern_capacity";
    case RateFormulaId::comp_ncc: return "comp_ncc";
    case RateFormulaId::dd_ncc: return "dd_ncc";
    case RateFormulaId::ncc_capacity: return "ncc_capacity";
    case RateFormulaId::ncomp_rate: return "ncomp_rate";
    case RateFormulaId::symm_capacity_small_alpha: return "symm_capacity_small_alpha";
    case RateFormulaId::erasure_dd: return "erasure_dd";
    case RateFormulaId::addition_comp: return "addition_comp";
    case RateFormulaId::separate_noiseless_limit: return "separate_noiseless_limit";
    case RateFormulaId::separate_symm_limit: return "separate_symm_limit";
    case RateFormulaId::individual_linear: return "individual_linear";
  }
  return "?";
}

RateFormulaId parse_rate_formula(const std::string& id) {
  for (auto f : all_rate_formulas())
    if (to_string(f) == id) return f;
  throw std::invalid_argument("unknown rate formula '" + id + "'");
}

std::string to_string(BoundResult::Kind kind) {
  return kind == BoundResult::Kind::achievable ? "achievable" : "converse";
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return plogp(x) + plogp(1.0 - x);
}

double maximize_1d(const std::function<double(double)>& f, double lo, double hi, double tol,
                   double* argmax) {
  constexpr int kGrid = 400;
  const double step = (hi - lo) / kGrid;
  int best = 0;
  double best_val = f(lo);
  for (int g = 1; g <= kGrid; ++g) {
    const double v = f(lo + step * g);
    if (v > best_val) {
      best_val = v;
      best = g;
    }
  }
  double a = std::max(lo, lo + step * (best - 1));
  double b = std::min(hi, lo + step * (best + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  double best_x = lo + step * best;
  if (fx >= best_val) {
    best_val = fx;
    best_x = x;
  }
  if (argmax) *argmax = best_x;
  return best_val;
}

BoundResult theoretical_rate(RateFormulaId id, double x, const RateModelParams& params) {
  using Kind = BoundResult::Kind;
  check_open_unit(x, id == RateFormulaId::individual_linear ? "beta" : "alpha");
  const double alpha = x;
  const double dd_factor = std::min(1.0, (1.0 - alpha) / alpha);
  switch (id) {
    case RateFormulaId::comp_bern:
      return {(1.0 - alpha) / (kE * kLn2), Kind::achievable};
    case RateFormulaId::dd_bern:
      return {dd_factor / (kE * kLn2), Kind::achievable};
    case RateFormulaId::sss_bern_bound:
      return {bernoulli_design_rate(alpha), Kind::converse};
    case RateFormulaId::bern_capacity:
      return {bernoulli_design_rate(alpha), Kind::achievable};
    case RateFormulaId::comp_ncc:
      return {kLn2 * (1.0 - alpha), Kind::achievable};
    case RateFormulaId::dd_ncc:
      return {kLn2 * dd_factor, Kind::achievable};
    case RateFormulaId::ncc_capacity:
      return {std::min(1.0, kLn2 * (1.0 - alpha) / alpha), Kind::achievable};
    case RateFormulaId::ncomp_rate: {
      const double rho = params.rho;
      if (!(rho >= 0.0 && rho < 0.5)) throw std::invalid_argument("ncomp_rate: rho must lie in [0, 0.5)");
      const double s = 1.0 + std::sqrt(alpha);
      return {(1.0 - 2.0 * rho) * (1.0 - 2.0 * rho) * (1.0 - alpha) / (4.36 * s * s), Kind::achievable};
    }
    case RateFormulaId::symm_capacity_small_alpha:
      if (!(params.rho >= 0.0 && params.rho <= 1.0)) throw std::invalid_argument("rho outside [0,1]");
      return {1.0 - binary_entropy(params.rho), Kind::converse};
    case RateFormulaId::erasure_dd:
      if (!(params.xi >= 0.0 && params.xi < 1.0)) throw std::invalid_argument("xi must lie in [0, 1)");
      return {(1.0 - params.xi) / (kE * kLn2) * dd_factor, Kind::achievable};
    case RateFormulaId::addition_comp:
      if (!(params.phi >= 0.0 && params.phi < 1.0)) throw std::invalid_argument("phi must lie in [0, 1)");
      return {(1.0 - params.phi) / (kE * kLn2) * (1.0 - alpha), Kind::achievable};
    case RateFormulaId::separate_noiseless_limit:
      return {kLn2, Kind::achievable};
    case RateFormulaId::separate_symm_limit:
      if (!(params.rho >= 0.0 && params.rho <= 1.0)) throw std::invalid_argument("rho outside [0,1]");
      return {kLn2 * (1.0 - binary_entropy(params.rho)), Kind::achievable};
    case RateFormulaId::individual_linear:
      return {binary_entropy(x), Kind::achievable};
  }
  throw std::invalid_argument("theoretical_rate: unknown formula");
}

double counting_bound_success(std::size_t n, std::size_t k, std::size_t T) {
  const double e = static_cast<double>(T) - log_binomial(n, k);
  return e >= 0.0 ? 1.0 : std::exp2(e);
}

double phi_k(std::size_t k, double q, std::size_t T) {
  if (!(q >= 0.0) || static_cast<double>(k) * q > 1.0 + 1e-15)
    throw std::invalid_argument("phi_k: need 0 <= q and l q <= 1 for all l <= k");
  CompensatedSum sum;
  double binom = 1.0;  // C(k, l)
  for (std::size_t l = 0; l <= k; ++l) {
    const double base = std::max(0.0, 1.0 - static_cast<double>(l) * q);
    const double term = binom * std::pow(base, static_cast<double>(T));
    sum.add(l % 2 ? -term : term);
    binom = binom * static_cast<double>(k - l) / static_cast<double>(l + 1);
  }
  return sum.value();
}

double comp_exact_success(std::size_t n, std::size_t k, double p, std::size_t T) {
  if (k > n) throw std::invalid_argument("comp_exact_success: k > n");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("comp_exact_success: p outside [0,1]");
  const double q0 = std::pow(1.0 - p, static_cast<double>(k));  // P(test is negative)
  const auto pmf = binomial_pmf(T, q0);
  const double nd = static_cast<double>(n - k);
  CompensatedSum sum;
  for (std::size_t t0 = 0; t0 <= T; ++t0) {
    if (pmf[t0] == 0.0) continue;
    const double miss = std::pow(1.0 - p, static_cast<double>(t0));  // item avoids all negative tests
    sum.add(pmf[t0] * std::pow(1.0 - miss, nd));
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

double sss_success_upper_bound(std::size_t n, std::size_t k, double p, std::size_t T) {
  if (k > n) throw std::invalid_argument("sss_success_upper_bound: k > n");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sss_success_upper_bound: p outside [0,1]");
  const double r = k == 0 ? 0.0 : p * std::pow(1.0 - p, static_cast<double>(k - 1));
  if (2.0 * r > 1.0) throw std::invalid_argument("sss_success_upper_bound: need 2r <= 1");
  const double kd = static_cast<double>(k);
  const double Td = static_cast<double>(T);
  const double v = 1.0 - kd * std::pow(1.0 - r, Td) + 0.5 * kd * kd * std::pow(1.0 - 2.0 * r, Td);
  return std::clamp(v, 0.0, 1.0);
}

double mutual_info_exact(const NoiseModel& model, double p, std::size_t k, std::size_t tau) {
  if (!model.only_defects_matter())
    throw UnsupportedModel("mutual_info_exact: test-size dependent model " + model.name());
  if (tau > k) throw std::invalid_argument("mutual_info_exact: tau > k");
  if (k > kMaxEnumerationK) throw ResourceLimitError("mutual_info_exact: k > 30");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mutual_info_exact: p outside [0,1]");
  const auto pmf0 = binomial_pmf(tau, p);
  const auto pmf1 = binomial_pmf(k - tau, p);
  std::vector<std::array<double, 3>> law(k + 1);
  std::vector<double> cond_entropy(k + 1);
  for (std::size_t l = 0; l <= k; ++l) {
    law[l] = outcome_law(model, l);
    cond_entropy[l] = entropy(law[l]);
  }
  CompensatedSum total;
  for (std::size_t l1 = 0; l1 <= k - tau; ++l1) {
    std::array<double, 3> mix{};
    double h_given = 0.0;
    for (std::size_t l0 = 0; l0 <= tau; ++l0) {
      for (int y = 0; y < 3; ++y) mix[y] += pmf0[l0] * law[l0 + l1][y];
      h_given += pmf0[l0] * cond_entropy[l0 + l1];
    }
    total.add(pmf1[l1] * (entropy(mix) - h_given));
  }
  return std::max(0.0, total.value());
}

double mutual_info_noiseless_closed_form(double p, std::size_t k, std::size_t tau) {
  if (tau > k) throw std::invalid_argument("mutual_info_noiseless_closed_form: tau > k");
  return std::pow(1.0 - p, static_cast<double>(k - tau)) *
         binary_entropy(std::pow(1.0 - p, static_cast<double>(tau)));
}

double single_item_mutual_info(const NoiseModel& model, double p, std::size_t k) {
  const auto lik = separate_likelihoods(model, p, k);
  double info = 0.0;
  for (int y = 0; y < 3; ++y) {
    const double py = lik.marginal[y];
    if (py <= 0.0) continue;
    for (int x = 0; x < 2; ++x) {
      const double px = x ? p : 1.0 - p;
      const double c = lik.conditional[y][x];
      if (c > 0.0 && px > 0.0) info += px * c * std::log2(c / py);
    }
  }
  return std::max(0.0, info);
}

double max_mutual_info(const NoiseModel& model, std::size_t k, double* argmax_p) {
  if (k == 0) throw std::invalid_argument("max_mutual_info: k must be positive");
  return maximize_1d([&](double p) { return mutual_info_exact(model, p, k, k); }, 0.0, 1.0, 1e-10,
                     argmax_p);
}

double converse_tests_general(std::size_t n, std::size_t k, const NoiseModel& model) {
  const double imax = max_mutual_info(model, k);
  if (imax <= 0.0) throw std::invalid_argument("converse_tests_general: channel carries no information");
  return log_binomial(n, k) / imax;
}

LinearRegimeTests linear_regime_tests(double beta, unsigned s) {
  check_open_unit(beta, "beta");
  const double m = std::ldexp(1.0, static_cast<int>(s));
  const double q = 1.0 - beta;
  LinearRegimeTests r;
  r.worst_case_per_n = 1.0 / m + (static_cast<double>(s) + 1.0 - 1.0 / m) * beta;
  const double E = (1.0 / beta) * (1.0 + m * std::pow(q, m + 1.0) - (m + 1.0) * std::pow(q, m)) +
                   m * std::pow(q, m);
  const double F = 1.0 + (1.0 - std::pow(q, m)) * static_cast<double>(s);
  r.average_per_n = F / E;
  return r;
}

}  // namespace gtlab
