#include "gtlab/decode_noiseless.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gtlab/errors.hpp"
#include "gtlab/simplex.hpp"

namespace gtlab {

namespace {

constexpr double kLpZero = 1e-7;

void check_binary(const TestMatrix& X, const OutcomeVector& y) {
  if (y.size() != X.num_tests())
    throw std::invalid_argument("decoder: outcome length " + std::to_string(y.size()) +
                                " does not match T=" + std::to_string(X.num_tests()));
  if (!is_binary(y)) throw std::invalid_argument("decoder: erased outcomes require the erasure wrapper");
}

DefectiveSet set_from_bits(std::span<const bits::Word> w) {
  std::vector<Item> items;
  bits::for_each(w, [&](std::size_t i) { items.push_back(static_cast<Item>(i)); });
  return DefectiveSet::from_sorted(std::move(items));
}

std::vector<bits::Word> pd_unchecked(const TestMatrix& X, const OutcomeVector& y) {
  const std::size_t n = X.num_items();
  std::vector<bits::Word> pd(X.row_words(), ~bits::Word{0});
  if (n % bits::kWordBits) pd.back() = (bits::Word{1} << (n % bits::kWordBits)) - 1;
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    if (y[t] != Outcome::negative) continue;
    auto row = X.row(t);
    for (std::size_t j = 0; j < pd.size(); ++j) pd[j] &= ~row[j];
  }
  return pd;
}

std::vector<bits::Word> dd_bits(const TestMatrix& X, const OutcomeVector& y,
                                const std::vector<bits::Word>& pd) {
  std::vector<bits::Word> out(X.row_words(), 0);
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    if (y[t] != Outcome::positive) continue;
    auto row = X.row(t);
    std::size_t found = 0;
    std::size_t item = 0;
    for (std::size_t j = 0; j < pd.size() && found < 2; ++j) {
      const bits::Word w = row[j] & pd[j];
      if (!w) continue;
      found += static_cast<std::size_t>(std::popcount(w));
      item = j * bits::kWordBits + static_cast<std::size_t>(std::countr_zero(w));
    }
    if (found == 1) bits::set(out, item);
  }
  return out;
}

// Exact minimum set cover restricted to a handful of candidates, explored in
// lexicographic order of the chosen index sequence so that the first cover
// found at the optimal size is the lexicographically smallest one.
class CoverSearch {
 public:
  CoverSearch(std::vector<std::uint64_t> test_masks, std::size_t num_candidates)
      : masks_(std::move(test_masks)), c_(num_candidates), words_(bits::words_for(masks_.size())) {
    covers_.assign(c_ * words_, 0);
    for (std::size_t t = 0; t < masks_.size(); ++t) {
      std::uint64_t m = masks_[t];
      while (m) {
        const auto i = static_cast<std::size_t>(std::countr_zero(m));
        covers_[i * words_ + t / 64] |= bits::Word{1} << (t % 64);
        m &= m - 1;
      }
    }
    order_.resize(masks_.size());
    for (std::size_t t = 0; t < order_.size(); ++t) order_[t] = t;
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return std::popcount(masks_[a]) < std::popcount(masks_[b]);
    });
  }

  std::vector<std::size_t> solve() {
    std::vector<bits::Word> all(words_, ~bits::Word{0});
    if (masks_.size() % 64) all.back() = (bits::Word{1} << (masks_.size() % 64)) - 1;
    if (masks_.empty()) return {};
    for (std::size_t budget = lower_bound(all, 0); budget <= c_; ++budget) {
      budget_ = budget;
      chosen_.clear();
      if (dfs(0, all)) return chosen_;
    }
    return {};
  }

 private:
  std::size_t lower_bound(const std::vector<bits::Word>& uncovered, std::size_t start) const {
    const std::uint64_t allowed = start >= 64 ? 0 : (~std::uint64_t{0} << start);
    std::uint64_t used = 0;
    std::size_t count = 0;
    for (std::size_t t : order_) {
      if (!((uncovered[t / 64] >> (t % 64)) & 1U)) continue;
      const std::uint64_t m = masks_[t] & allowed;
      if ((m & used) == 0) {
        ++count;
        used |= m;
      }
    }
    return count;
  }

  bool dfs(std::size_t start, const std::vector<bits::Word>& uncovered) {
    bool any = false;
    for (bits::Word w : uncovered)
      if (w) { any = true; break; }
    if (!any) return true;
    const std::size_t left = budget_ - chosen_.size();
    if (left == 0) return false;

    // Every uncovered test needs a candidate at or after `start`; the
    // smallest such "last chance" index bounds how far the loop may skip.
    std::size_t last_chance = c_;
    const std::uint64_t allowed = start >= 64 ? 0 : (~std::uint64_t{0} << start);
    bool dead = false;
    bits::for_each(std::span<const bits::Word>(uncovered), [&](std::size_t t) {
      const std::uint64_t m = masks_[t] & allowed;
      if (!m) { dead = true; return; }
      last_chance = std::min(last_chance, static_cast<std::size_t>(63 - std::countl_zero(m)));
    });
    if (dead) return false;
    if (lower_bound(uncovered, start) > left) return false;

    std::vector<bits::Word> next(words_);
    for (std::size_t i = start; i <= last_chance; ++i) {
      const bits::Word* cov = covers_.data() + i * words_;
      bool useful = false;
      for (std::size_t j = 0; j < words_; ++j) {
        next[j] = uncovered[j] & ~cov[j];
        if (uncovered[j] & cov[j]) useful = true;
      }
      if (!useful) continue;
      chosen_.push_back(i);
      if (dfs(i + 1, next)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  std::vector<std::uint64_t> masks_;
  std::size_t c_;
  std::size_t words_;
  std::vector<bits::Word> covers_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> chosen_;
  std::size_t budget_ = 0;
};

}  // namespace

bool is_satisfying(const TestMatrix& X, const OutcomeVector& y, const DefectiveSet& L) {
  check_binary(X, y);
  const auto lbits = indicator_bits(L, X.num_items());
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    const bool hit = bits::intersects(X.row(t), lbits);
    if (hit != (y[t] == Outcome::positive)) return false;
  }
  return true;
}

std::vector<bits::Word> possible_defectives(const TestMatrix& X, const OutcomeVector& y) {
  check_binary(X, y);
  return pd_unchecked(X, y);
}

DefectiveSet comp(const TestMatrix& X, const OutcomeVector& y) {
  return set_from_bits(possible_defectives(X, y));
}

DefectiveSet dd(const TestMatrix& X, const OutcomeVector& y) {
  const auto pd = possible_defectives(X, y);
  return set_from_bits(dd_bits(X, y, pd));
}

DefectiveSet scomp(const TestMatrix& X, const OutcomeVector& y) {
  const auto pd = possible_defectives(X, y);
  auto chosen = dd_bits(X, y, pd);
  std::vector<bits::Word> unexplained(X.column_words(), 0);
  std::size_t remaining = 0;
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    if (y[t] == Outcome::positive && !bits::intersects(X.row(t), chosen)) {
      bits::set(unexplained, t);
      ++remaining;
    }
  }
  while (remaining > 0) {
    std::size_t best = X.num_items();
    std::size_t best_count = 0;
    bits::for_each(std::span<const bits::Word>(pd), [&](std::size_t i) {
      if (bits::test(chosen, i)) return;
      const std::size_t c = bits::count_and(X.column(i), unexplained);
      if (c > best_count) {
        best_count = c;
        best = i;
      }
    });
    if (best_count == 0) break;  // inconsistent outcomes: nothing can explain the rest
    bits::set(chosen, best);
    auto col = X.column(best);
    for (std::size_t j = 0; j < unexplained.size(); ++j) unexplained[j] &= ~col[j];
    remaining -= best_count;
  }
  return set_from_bits(chosen);
}

DefectiveSet sss_exact(const TestMatrix& X, const OutcomeVector& y, std::size_t cap) {
  const auto pd = possible_defectives(X, y);
  const std::size_t pd_size = bits::count(pd);
  if (pd_size > cap)
    throw ResourceLimitError("sss_exact: " + std::to_string(pd_size) +
                             " possible defectives exceed the search cap " + std::to_string(cap));
  const auto forced = dd_bits(X, y, pd);

  std::vector<std::size_t> uncovered_tests;
  for (std::size_t t = 0; t < X.num_tests(); ++t)
    if (y[t] == Outcome::positive && !bits::intersects(X.row(t), forced)) uncovered_tests.push_back(t);

  std::vector<std::size_t> candidates;
  bits::for_each(std::span<const bits::Word>(pd), [&](std::size_t i) {
    if (bits::test(forced, i)) return;
    for (std::size_t t : uncovered_tests)
      if (X.contains(t, i)) { candidates.push_back(i); return; }
  });
  if (candidates.size() > 64)
    throw ResourceLimitError("sss_exact: more than 64 undetermined candidates");

  std::vector<std::uint64_t> masks(uncovered_tests.size(), 0);
  for (std::size_t u = 0; u < uncovered_tests.size(); ++u) {
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (X.contains(uncovered_tests[u], candidates[c])) masks[u] |= std::uint64_t{1} << c;
    if (!masks[u]) throw std::invalid_argument("sss_exact: outcomes admit no satisfying set");
  }

  CoverSearch search(std::move(masks), candidates.size());
  auto result = forced;
  for (std::size_t c : search.solve()) bits::set(result, candidates[c]);
  return set_from_bits(result);
}

LpSolution lp_relaxation(const TestMatrix& X, const OutcomeVector& y) {
  const auto pd = possible_defectives(X, y);
  std::vector<std::size_t> vars;
  std::vector<std::size_t> var_of(X.num_items(), X.num_items());
  bits::for_each(std::span<const bits::Word>(pd), [&](std::size_t i) {
    var_of[i] = vars.size();
    vars.push_back(i);
  });

  LpSolution sol;
  sol.z.assign(X.num_items(), 0.0);
  // Items in negative tests are pinned to zero, which satisfies every
  // equality row; only positive tests over possible defectives remain.
  lp::Problem prob;
  prob.num_vars = vars.size();
  prob.cost.assign(vars.size(), 1.0);
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    if (y[t] != Outcome::positive) continue;
    lp::Constraint row;
    row.sense = lp::Sense::ge;
    row.rhs = 1.0;
    bits::for_each_and(X.row(t), std::span<const bits::Word>(pd),
                       [&](std::size_t i) { row.terms.emplace_back(var_of[i], 1.0); });
    if (row.terms.empty()) {
      sol.status = LpSolution::Status::infeasible;
      return sol;
    }
    prob.rows.push_back(std::move(row));
  }
  if (prob.rows.empty()) {
    sol.status = LpSolution::Status::optimal;
    return sol;
  }
  const auto res = lp::solve(prob);
  if (res.status != lp::Status::optimal) {
    if (res.status == lp::Status::unbounded) throw SolverFailure("lp_relaxation: unbounded");
    sol.status = LpSolution::Status::infeasible;
    return sol;
  }
  for (std::size_t v = 0; v < vars.size(); ++v) sol.z[vars[v]] = res.x[v];
  sol.objective = res.objective;
  sol.status = LpSolution::Status::optimal;
  return sol;
}

DefectiveSet round_lp(const std::vector<double>& z, LpRounding rounding) {
  std::vector<Item> items;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const bool on = rounding == LpRounding::strict_positive ? z[i] > kLpZero : z[i] >= 0.5 - kLpZero;
    if (on) items.push_back(static_cast<Item>(i));
  }
  return DefectiveSet::from_sorted(std::move(items));
}

DefectiveSet lp_decode(const TestMatrix& X, const OutcomeVector& y, LpRounding rounding) {
  const auto sol = lp_relaxation(X, y);
  if (sol.status != LpSolution::Status::optimal)
    throw SolverFailure("lp_decode: relaxation infeasible (outcomes inconsistent with any set)");
  return round_lp(sol.z, rounding);
}

double log_likelihood(const TestMatrix& X, const OutcomeVector& y, const DefectiveSet& L,
                      const NoiseModel& model) {
  if (y.size() != X.num_tests()) throw std::invalid_argument("log_likelihood: length mismatch");
  const auto lbits = indicator_bits(L, X.num_items());
  double s = 0.0;
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    const std::size_t l = bits::count_and(X.row(t), lbits);
    s += std::log(transition_probability(model, y[t], X.row_weight(t), l));
  }
  return s;
}

DefectiveSet ml_oracle(const TestMatrix& X, const OutcomeVector& y, std::size_t k,
                       const NoiseModel& model) {
  const std::size_t n = X.num_items();
  const std::size_t T = X.num_tests();
  if (y.size() != T) throw std::invalid_argument("ml_oracle: length mismatch");
  if (k > n) throw std::invalid_argument("ml_oracle: k > n");
  if (log_binomial(n, k) > std::log2(kMlOracleLimit))
    throw ResourceLimitError("ml_oracle: C(n,k) exceeds the enumeration limit");
  if (k == 0) return {};

  // ln p(y_t | m_t, l) for every test and every possible l.
  std::vector<double> table(T * (k + 1));
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t m = X.row_weight(t);
    for (std::size_t l = 0; l <= k; ++l)
      table[t * (k + 1) + l] = l <= m ? std::log(transition_probability(model, y[t], m, l))
                                      : -std::numeric_limits<double>::infinity();
  }

  std::vector<std::size_t> comb(k);
  for (std::size_t j = 0; j < k; ++j) comb[j] = j;
  std::vector<std::size_t> best = comb;
  double best_ll = -std::numeric_limits<double>::infinity();
  bool have = false;
  std::vector<std::size_t> l(T);
  while (true) {
    std::fill(l.begin(), l.end(), 0);
    for (std::size_t i : comb) X.for_each_in_column(i, [&](std::size_t t) { ++l[t]; });
    double ll = 0.0;
    for (std::size_t t = 0; t < T; ++t) ll += table[t * (k + 1) + l[t]];
    // Sums of the same terms in another order can differ in the last bits;
    // treat those as ties so the lexicographically first set is kept.
    const bool better = std::isinf(best_ll) ? ll > best_ll : ll > best_ll + 1e-12 * std::max(1.0, std::abs(best_ll));
    if (!have || better) {
      best_ll = ll;
      best = comb;
      have = true;
    }
    // Next combination in lexicographic order.
    std::size_t j = k;
    while (j > 0 && comb[j - 1] == n - k + j - 1) --j;
    if (j == 0) break;
    ++comb[j - 1];
    for (std::size_t r = j; r < k; ++r) comb[r] = comb[r - 1] + 1;
  }
  std::vector<Item> items(best.begin(), best.end());
  return DefectiveSet::from_sorted(std::move(items));
}

NoiselessDecoder parse_noiseless_decoder(const std::string& id) {
  for (auto d : {NoiselessDecoder::comp, NoiselessDecoder::dd, NoiselessDecoder::scomp, NoiselessDecoder::sss,
                 NoiselessDecoder::lp_strict, NoiselessDecoder::lp_half})
    if (to_string(d) == id) return d;
  if (id == "lp") return NoiselessDecoder::lp_strict;
  throw std::invalid_argument("unknown noiseless decoder '" + id + "'");
}

std::string to_string(NoiselessDecoder id) {
  switch (id) {
    case NoiselessDecoder::comp: return "comp";
    case NoiselessDecoder::dd: return "dd";
    case NoiselessDecoder::scomp: return "scomp";
    case NoiselessDecoder::sss: return "sss";
    case NoiselessDecoder::lp_strict: return "lp_strict";
    case NoiselessDecoder::lp_half: return "lp_half";
  }
  return "?";
}

DefectiveSet decode_noiseless(NoiselessDecoder id, const TestMatrix& X, const OutcomeVector& y,
                              std::size_t sss_cap) {
  switch (id) {
    case NoiselessDecoder::comp: return comp(X, y);
    case NoiselessDecoder::dd: return dd(X, y);
    case NoiselessDecoder::scomp: return scomp(X, y);
    case NoiselessDecoder::sss: return sss_exact(X, y, sss_cap);
    case NoiselessDecoder::lp_strict: return lp_decode(X, y, LpRounding::strict_positive);
    case NoiselessDecoder::lp_half: return lp_decode(X, y, LpRounding::half);
  }
  throw std::invalid_argument("decode_noiseless: unknown decoder");
}

}  // namespace gtlab
