#include "gtlab/decode_noisy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gtlab/analysis.hpp"
#include "gtlab/errors.hpp"
#include "gtlab/simplex.hpp"

namespace gtlab {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kMaxLogRatio = 700.0;

void check_outcomes(const TestMatrix& X, const OutcomeVector& y, bool allow_erased) {
  if (y.size() != X.num_tests())
    throw std::invalid_argument("decoder: outcome length " + std::to_string(y.size()) +
                                " does not match T=" + std::to_string(X.num_tests()));
  if (!allow_erased && !is_binary(y))
    throw std::invalid_argument("decoder: erased outcomes require the erasure wrapper");
}

std::vector<bits::Word> outcome_mask(const OutcomeVector& y, Outcome value) {
  std::vector<bits::Word> m(bits::words_for(y.size()), 0);
  for (std::size_t t = 0; t < y.size(); ++t)
    if (y[t] == value) bits::set(m, t);
  return m;
}

double clamp_ratio(double v) {
  return std::clamp(v, -kMaxLogRatio, kMaxLogRatio);
}

double sigmoid(double v) {
  return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

}  // namespace

NcompParams NcompParams::simulation_default(double rho) {
  return {rho, 0.1 * (1.0 - 2.0 * rho) / rho};
}

NcompResult ncomp(const TestMatrix& X, const OutcomeVector& y, const NcompParams& params) {
  check_outcomes(X, y, false);
  if (!(params.rho > 0.0 && params.rho < 0.5)) throw std::invalid_argument("ncomp: rho must lie in (0, 0.5)");
  if (!(params.delta > 0.0)) throw std::invalid_argument("ncomp: delta must be positive");
  const double threshold = 1.0 - params.rho * (1.0 + params.delta);
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("ncomp: threshold 1 - rho(1 + delta) must lie in (0, 1)");

  const auto positive = outcome_mask(y, Outcome::positive);
  NcompResult res;
  std::vector<Item> items;
  for (std::size_t i = 0; i < X.num_items(); ++i) {
    const std::size_t tests = X.column_weight(i);
    if (tests == 0) {
      res.untested.push_back(static_cast<Item>(i));
      continue;
    }
    const std::size_t pos = bits::count_and(X.column(i), positive);
    if (static_cast<double>(pos) >= threshold * static_cast<double>(tests)) items.push_back(static_cast<Item>(i));
  }
  res.estimate = DefectiveSet::from_sorted(std::move(items));
  return res;
}

std::vector<double> binomial_pmf(std::size_t n, double p) {
  std::vector<double> pmf(n + 1, 0.0);
  if (p <= 0.0) { pmf[0] = 1.0; return pmf; }
  if (p >= 1.0) { pmf[n] = 1.0; return pmf; }
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  for (std::size_t j = 0; j <= n; ++j) {
    const double lc = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
                      std::lgamma(static_cast<double>(n - j) + 1.0);
    pmf[j] = std::exp(lc + static_cast<double>(j) * lp + static_cast<double>(n - j) * lq);
  }
  return pmf;
}

SeparateLikelihoods separate_likelihoods(const NoiseModel& model, double p, std::size_t k) {
  if (!model.only_defects_matter())
    throw UnsupportedModel("separate decoding needs an only-defects-matter model, got " + model.name());
  if (k == 0) throw std::invalid_argument("separate_likelihoods: k must be positive");
  const Outcome alphabet[3] = {Outcome::negative, Outcome::positive, Outcome::erased};
  const auto others = binomial_pmf(k - 1, p);
  const auto all = binomial_pmf(k, p);
  SeparateLikelihoods s;
  for (int yv = 0; yv < 3; ++yv) {
    if (yv == 2 && !model.has_erasures()) continue;
    const Outcome y = alphabet[yv];
    for (int x = 0; x < 2; ++x) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t l = j + static_cast<std::size_t>(x);
        acc += others[j] * transition_probability(model, y, l, l);
      }
      s.conditional[yv][x] = acc;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) acc += all[j] * transition_probability(model, y, j, j);
    s.marginal[yv] = acc;
  }
  return s;
}

SeparateDecodingParams SeparateDecodingParams::union_bound(std::size_t n, std::size_t k, double p,
                                                           double delta) {
  if (!(delta > 0.0) || n <= k) throw std::invalid_argument("separate: need delta > 0 and n > k");
  return {std::log2(static_cast<double>(n - k) / delta), p, k};
}

SeparateDecodingParams SeparateDecodingParams::information(const NoiseModel& model, std::size_t T,
                                                           std::size_t k, double p, double delta) {
  const double i1 = single_item_mutual_info(model, p, k);
  return {(1.0 - delta) * static_cast<double>(T) * i1, p, k};
}

DefectiveSet separate_decode(const TestMatrix& X, const OutcomeVector& y, const NoiseModel& model,
                             const SeparateDecodingParams& params) {
  check_outcomes(X, y, model.has_erasures());
  if (std::isnan(params.gamma)) throw std::invalid_argument("separate_decode: gamma is NaN");
  const auto lik = separate_likelihoods(model, params.design_p, params.k);

  // term[y][x] = log2 P(y | x, U=1) / P(y); 0/0 (an outcome that cannot occur) contributes 0.
  double term[3][2];
  for (int yv = 0; yv < 3; ++yv)
    for (int x = 0; x < 2; ++x) {
      const double num = lik.conditional[yv][x];
      const double den = lik.marginal[yv];
      if (den <= 0.0) term[yv][x] = 0.0;
      else if (num <= 0.0) term[yv][x] = -std::numeric_limits<double>::infinity();
      else term[yv][x] = std::log2(num / den);
    }

  // Every item starts from the all-absent score; its own tests then swap the
  // x = 0 term for the x = 1 term.
  double base = 0.0;
  for (Outcome o : y) base += term[static_cast<int>(o)][0];
  std::vector<Item> items;
  for (std::size_t i = 0; i < X.num_items(); ++i) {
    double score = base;
    bool impossible = false;
    X.for_each_in_column(i, [&](std::size_t t) {
      const int yv = static_cast<int>(y[t]);
      if (std::isinf(term[yv][1])) impossible = true;
      else score += term[yv][1] - term[yv][0];
    });
    if (impossible) score = -std::numeric_limits<double>::infinity();
    if (score >= params.gamma) items.push_back(static_cast<Item>(i));
  }
  return DefectiveSet::from_sorted(std::move(items));
}

DefectiveSet ndd(const TestMatrix& X, const OutcomeVector& y, const NddParams& params) {
  check_outcomes(X, y, false);
  if (params.gamma1 < 0.0 || params.gamma2 < 0.0) throw std::invalid_argument("ndd: thresholds must be nonnegative");
  if (params.k == 0 || !(params.nu > 0.0)) throw std::invalid_argument("ndd: need k >= 1 and nu > 0");
  const double T = static_cast<double>(X.num_tests());
  const double k = static_cast<double>(params.k);
  const double neg_threshold = params.gamma1 * T * params.nu / k;
  const double pos_threshold = params.gamma2 * T * params.nu * std::exp(-params.nu) / k;

  const auto negative = outcome_mask(y, Outcome::negative);
  std::vector<bits::Word> pd(X.row_words(), 0);
  for (std::size_t i = 0; i < X.num_items(); ++i)
    if (!(static_cast<double>(bits::count_and(X.column(i), negative)) > neg_threshold)) bits::set(pd, i);

  std::vector<std::size_t> unique_hits(X.num_items(), 0);
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    if (y[t] != Outcome::positive) continue;
    std::size_t count = 0;
    std::size_t item = 0;
    bits::for_each_and(X.row(t), std::span<const bits::Word>(pd), [&](std::size_t i) {
      ++count;
      item = i;
    });
    if (count == 1) ++unique_hits[item];
  }
  std::vector<Item> items;
  for (std::size_t i = 0; i < X.num_items(); ++i)
    if (bits::test(pd, i) && static_cast<double>(unique_hits[i]) > pos_threshold) items.push_back(static_cast<Item>(i));
  return DefectiveSet::from_sorted(std::move(items));
}

LpSolution noisy_lp_solve(const TestMatrix& X, const OutcomeVector& y, const NoisyLpParams& params) {
  check_outcomes(X, y, false);
  if (!(params.zeta > 0.0)) throw std::invalid_argument("noisy_lp: zeta must be positive");
  const std::size_t n = X.num_items();
  const auto positive = outcome_mask(y, Outcome::positive);
  const auto negative = outcome_mask(y, Outcome::negative);

  // Negative-test slacks equal the mass placed in the test, so they fold into
  // a per-item cost 1 + zeta * neg_i. An item whose cost is at least
  // zeta * pos_i is never worth using: shifting its mass onto the positive
  // slacks of its tests keeps feasibility without raising the objective.
  std::vector<std::size_t> vars;
  std::vector<std::size_t> var_of(n, n);
  std::vector<double> item_cost(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto neg = static_cast<double>(bits::count_and(X.column(i), negative));
    const auto pos = static_cast<double>(bits::count_and(X.column(i), positive));
    if (params.pin_negative_slack && neg > 0) continue;
    if (pos == 0) continue;
    item_cost[i] = 1.0 + (params.pin_negative_slack ? 0.0 : params.zeta * neg);
    if (!params.pin_positive_slack && item_cost[i] >= params.zeta * pos) continue;
    var_of[i] = vars.size();
    vars.push_back(i);
  }

  lp::Problem prob;
  prob.num_vars = vars.size();
  for (std::size_t v : vars) prob.cost.push_back(item_cost[v]);
  std::size_t uncovered_free = 0;  // positive tests with no usable item: slack 1
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    if (y[t] != Outcome::positive) continue;
    lp::Constraint row;
    row.sense = lp::Sense::ge;
    row.rhs = 1.0;
    X.for_each_in_row(t, [&](std::size_t i) {
      if (var_of[i] < n) row.terms.emplace_back(var_of[i], 1.0);
    });
    if (row.terms.empty()) {
      if (params.pin_positive_slack) {
        LpSolution bad;
        bad.z.assign(n, 0.0);
        bad.status = LpSolution::Status::infeasible;
        return bad;
      }
      ++uncovered_free;
      continue;
    }
    if (!params.pin_positive_slack) {
      row.terms.emplace_back(prob.num_vars++, 1.0);
      prob.cost.push_back(params.zeta);
    }
    prob.rows.push_back(std::move(row));
  }

  LpSolution sol;
  sol.z.assign(n, 0.0);
  double objective = params.zeta * static_cast<double>(uncovered_free);
  if (!prob.rows.empty()) {
    const auto res = lp::solve(prob);
    if (res.status != lp::Status::optimal) {
      if (res.status == lp::Status::unbounded) throw SolverFailure("noisy_lp: unbounded");
      sol.status = LpSolution::Status::infeasible;
      return sol;
    }
    for (std::size_t v = 0; v < vars.size(); ++v) sol.z[vars[v]] = res.x[v];
    objective += res.objective;
  }
  sol.objective = objective;
  sol.status = LpSolution::Status::optimal;
  return sol;
}

DefectiveSet noisy_lp(const TestMatrix& X, const OutcomeVector& y, const NoisyLpParams& params) {
  const auto sol = noisy_lp_solve(X, y, params);
  if (sol.status != LpSolution::Status::optimal) throw SolverFailure("noisy_lp: infeasible");
  if (params.rounding == NoisyLpParams::Rounding::strict_positive)
    return round_lp(sol.z, LpRounding::strict_positive);
  std::vector<Item> items;
  for (std::size_t i = 0; i < sol.z.size(); ++i)
    if (sol.z[i] >= 0.5 - 1e-9) items.push_back(static_cast<Item>(i));
  return DefectiveSet::from_sorted(std::move(items));
}

BpModel BpModel::from_noise(const NoiseModel& model) {
  switch (model.kind) {
    case NoiseKind::noiseless: return symmetric(0.0);
    case NoiseKind::symmetric:
      if (!(model.param < 0.5)) throw UnsupportedModel("bp: symmetric noise needs rho < 0.5");
      return symmetric(model.param);
    case NoiseKind::addition: return addition_dilution(model.param, 0.0);
    case NoiseKind::dilution: return addition_dilution(0.0, model.param);
    default: break;
  }
  throw UnsupportedModel("bp: no message form for noise model " + model.name());
}

BpResult bp_decode(const TestMatrix& X, const OutcomeVector& y, const BpParams& params) {
  check_outcomes(X, y, false);
  const double q = params.prior_q;
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("bp: prior_q must lie in (0, 1)");
  const BpModel& model = params.model;
  if (model.kind == BpModel::Kind::symmetric && !(model.rho >= 0.0 && model.rho < 0.5))
    throw UnsupportedModel("bp: symmetric noise needs rho in [0, 0.5)");

  const std::size_t n = X.num_items();
  const std::size_t T = X.num_tests();
  // Edges grouped by test; item_edges lists the edges of each item.
  std::vector<std::size_t> test_start(T + 1, 0);
  std::vector<std::size_t> edge_item;
  for (std::size_t t = 0; t < T; ++t) {
    X.for_each_in_row(t, [&](std::size_t i) { edge_item.push_back(i); });
    test_start[t + 1] = edge_item.size();
  }
  const std::size_t E = edge_item.size();
  std::vector<std::size_t> item_start(n + 1, 0);
  for (std::size_t e = 0; e < E; ++e) ++item_start[edge_item[e] + 1];
  std::partial_sum(item_start.begin(), item_start.end(), item_start.begin());
  std::vector<std::size_t> item_edges(E);
  {
    std::vector<std::size_t> fill(item_start.begin(), item_start.end() - 1);
    for (std::size_t e = 0; e < E; ++e) item_edges[fill[edge_item[e]]++] = e;
  }

  const double prior_ratio = std::log(q) - std::log1p(-q);
  std::vector<double> to_test(E, prior_ratio);  // log P(u=1)/P(u=0), item -> test
  std::vector<double> to_item(E, 0.0);          // log ratio, test -> item
  std::vector<double> belief(n, prior_ratio);
  std::vector<double> prefix, suffix;

  for (std::size_t round = 0; round < params.iterations && E > 0; ++round) {
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t b = test_start[t];
      const std::size_t d = test_start[t + 1] - b;
      if (d == 0) continue;
      // Per-neighbour factor f_j: P(u_j = 0) for the symmetric form and
      // E[theta^{u_j}] for addition-dilution.
      prefix.assign(d + 1, 1.0);
      suffix.assign(d + 1, 1.0);
      auto factor = [&](std::size_t e) {
        const double m0 = sigmoid(-to_test[e]);
        return model.kind == BpModel::Kind::symmetric ? m0 : model.theta + (1.0 - model.theta) * m0;
      };
      for (std::size_t j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * factor(b + j);
      for (std::size_t j = d; j-- > 0;) suffix[j] = suffix[j + 1] * factor(b + j);
      const bool positive = y[t] == Outcome::positive;
      for (std::size_t j = 0; j < d; ++j) {
        const double rest = prefix[j] * suffix[j + 1];
        double a1 = 0.0;
        double a0 = 0.0;
        if (model.kind == BpModel::Kind::symmetric) {
          const double rho = model.rho;
          if (positive) {
            a1 = 1.0 - rho;
            a0 = (1.0 - rho) - (1.0 - 2.0 * rho) * rest;
          } else {
            a1 = rho;
            a0 = rho + (1.0 - 2.0 * rho) * rest;
          }
        } else {
          const double keep = 1.0 - model.phi;
          if (positive) {
            a1 = 1.0 - keep * model.theta * rest;
            a0 = 1.0 - keep * rest;
          } else {
            a1 = model.theta;
            a0 = 1.0;
          }
        }
        to_item[b + j] = clamp_ratio(std::log(std::max(a1, kTiny)) - std::log(std::max(a0, kTiny)));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double total = prior_ratio;
      for (std::size_t k = item_start[i]; k < item_start[i + 1]; ++k) total += to_item[item_edges[k]];
      belief[i] = total;
      for (std::size_t k = item_start[i]; k < item_start[i + 1]; ++k) {
        const std::size_t e = item_edges[k];
        to_test[e] = clamp_ratio(total - to_item[e]);
      }
    }
  }

  BpResult res;
  res.marginals.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.marginals[i] = sigmoid(belief[i]);
  std::vector<Item> items;
  if (params.top_k) {
    std::vector<Item> order(n);
    std::iota(order.begin(), order.end(), Item{0});
    const std::size_t k = std::min(params.k, n);
    std::stable_sort(order.begin(), order.end(),
                     [&](Item a, Item b) { return res.marginals[a] > res.marginals[b]; });
    items.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(items.begin(), items.end());
  } else {
    for (std::size_t i = 0; i < n; ++i)
      if (res.marginals[i] > 0.5) items.push_back(static_cast<Item>(i));
  }
  res.estimate = DefectiveSet::from_sorted(std::move(items));
  return res;
}

ErasureResult erasure_wrap(const TestMatrix& X, const OutcomeVector& y, NoiselessDecoder inner,
                           std::size_t sss_cap) {
  check_outcomes(X, y, true);
  std::vector<std::size_t> kept;
  OutcomeVector y_kept;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] == Outcome::erased) continue;
    kept.push_back(t);
    y_kept.push_back(y[t]);
  }
  ErasureResult res;
  if (kept.empty() && !y.empty()) {
    res.degenerate = true;
    return res;
  }
  if (kept.size() == y.size()) {
    res.estimate = decode_noiseless(inner, X, y, sss_cap);
    return res;
  }
  res.estimate = decode_noiseless(inner, X.select_rows(kept), y_kept, sss_cap);
  return res;
}

}  // namespace gtlab
