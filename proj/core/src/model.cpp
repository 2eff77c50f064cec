#include "gtlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gtlab {

DefectiveSet::DefectiveSet(std::initializer_list<Item> items)
    : DefectiveSet(from_items(std::vector<Item>(items))) {}

DefectiveSet DefectiveSet::from_items(std::vector<Item> items) {
  std::sort(items.begin(), items.end());
  if (std::adjacent_find(items.begin(), items.end()) != items.end())
    throw std::invalid_argument("DefectiveSet: duplicate item index");
  DefectiveSet s;
  s.items_ = std::move(items);
  return s;
}

DefectiveSet DefectiveSet::from_sorted(std::vector<Item> items) {
  for (std::size_t j = 1; j < items.size(); ++j)
    if (items[j - 1] >= items[j])
      throw std::invalid_argument("DefectiveSet: items not strictly increasing");
  DefectiveSet s;
  s.items_ = std::move(items);
  return s;
}

bool DefectiveSet::contains(Item i) const {
  return std::binary_search(items_.begin(), items_.end(), i);
}

void DefectiveSet::check_range(std::size_t n) const {
  if (!items_.empty() && items_.back() >= n)
    throw std::invalid_argument("DefectiveSet: item index " + std::to_string(items_.back()) +
                                " out of range for n=" + std::to_string(n));
}

TestMatrixBuilder::TestMatrixBuilder(std::size_t tests, std::size_t items)
    : tests_(tests), items_(items), row_words_(bits::words_for(items)),
      rows_(tests * bits::words_for(items), 0) {}

TestMatrix TestMatrixBuilder::build() && {
  TestMatrix X;
  X.tests_ = tests_;
  X.items_ = items_;
  X.row_words_ = row_words_;
  X.col_words_ = bits::words_for(tests_);
  X.rows_ = std::move(rows_);
  return X;
}

const std::vector<bits::Word>& TestMatrix::columns() const {
  std::call_once(cols_->once, [this] {
    auto& cols = cols_->words;
    cols.assign(items_ * col_words_, 0);
    for (std::size_t t = 0; t < tests_; ++t) {
      const bits::Word tbit = bits::Word{1} << (t % bits::kWordBits);
      const std::size_t tword = t / bits::kWordBits;
      bits::for_each(row(t), [&](std::size_t i) { cols[i * col_words_ + tword] |= tbit; });
    }
  });
  return cols_->words;
}

TestMatrix TestMatrix::from_rows(const std::vector<std::string>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  TestMatrixBuilder b(rows.size(), n);
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].size() != n) throw std::invalid_argument("TestMatrix: ragged rows");
    for (std::size_t i = 0; i < n; ++i) {
      const char c = rows[t][i];
      if (c == '1') b.set(t, i);
      else if (c != '0') throw std::invalid_argument("TestMatrix: row characters must be 0 or 1");
    }
  }
  return std::move(b).build();
}

TestMatrix TestMatrix::identity(std::size_t n) {
  TestMatrixBuilder b(n, n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, i);
  return std::move(b).build();
}

TestMatrix TestMatrix::select_rows(std::span<const std::size_t> rows) const {
  TestMatrixBuilder b(rows.size(), items_);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = row(rows[r]);
    std::copy(src.begin(), src.end(), b.row(r).begin());
  }
  return std::move(b).build();
}

std::string TestMatrix::row_string(std::size_t t) const {
  std::string s(items_, '0');
  for_each_in_row(t, [&](std::size_t i) { s[i] = '1'; });
  return s;
}

DefectiveSet sample_defective_set_combinatorial(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("sample_defective_set_combinatorial: k > n");
  // Floyd's algorithm: every k-subset has probability 1/C(n,k).
  std::vector<Item> chosen;
  chosen.reserve(k);
  std::vector<char> mark;
  const bool use_mark = k > 32;
  if (use_mark) mark.assign(n, 0);
  for (std::size_t j = n - k; j < n; ++j) {
    auto t = static_cast<Item>(uniform_index(rng, j + 1));
    bool present = use_mark ? mark[t] != 0
                            : std::find(chosen.begin(), chosen.end(), t) != chosen.end();
    if (present) t = static_cast<Item>(j);
    chosen.push_back(t);
    if (use_mark) mark[t] = 1;
  }
  std::sort(chosen.begin(), chosen.end());
  return DefectiveSet::from_sorted(std::move(chosen));
}

DefectiveSet sample_defective_set_iid(std::size_t n, double q, Rng& rng) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("sample_defective_set_iid: q outside [0,1]");
  std::vector<Item> items;
  for (std::size_t i = 0; i < n; ++i)
    if (bernoulli(rng, q)) items.push_back(static_cast<Item>(i));
  return DefectiveSet::from_sorted(std::move(items));
}

std::vector<bits::Word> indicator_bits(const DefectiveSet& K, std::size_t n) {
  K.check_range(n);
  std::vector<bits::Word> w(bits::words_for(n), 0);
  for (Item i : K) bits::set(w, i);
  return w;
}

OutcomeVector noiseless_outcomes(const TestMatrix& X, const DefectiveSet& K) {
  K.check_range(X.num_items());
  OutcomeVector y(X.num_tests(), Outcome::negative);
  const auto kbits = indicator_bits(K, X.num_items());
  for (std::size_t t = 0; t < X.num_tests(); ++t)
    if (bits::intersects(X.row(t), kbits)) y[t] = Outcome::positive;
  return y;
}

RecoveryReport evaluate_recovery(const DefectiveSet& truth, const DefectiveSet& estimate,
                                 std::size_t d) {
  std::size_t common = 0;
  auto a = truth.begin();
  auto b = estimate.begin();
  while (a != truth.end() && b != estimate.end()) {
    if (*a < *b) ++a;
    else if (*b < *a) ++b;
    else { ++common; ++a; ++b; }
  }
  RecoveryReport r;
  r.false_positives = estimate.size() - common;
  r.false_negatives = truth.size() - common;
  r.exact = r.false_positives == 0 && r.false_negatives == 0;
  r.success = r.false_positives <= d && r.false_negatives <= d;
  return r;
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("log_binomial: k > n");
  const std::size_t m = std::min(k, n - k);
  if (m == 0) return 0.0;
  if (m <= 64) {
    double s = 0.0;
    for (std::size_t j = 1; j <= m; ++j)
      s += std::log2(static_cast<double>(n - m + j) / static_cast<double>(j));
    return s;
  }
  const double ln = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(n - k) + 1.0);
  return ln / std::numbers::ln2;
}

double rate(std::size_t n, std::size_t k, std::size_t T) {
  if (T == 0) throw std::invalid_argument("rate: T must be positive");
  return log_binomial(n, k) / static_cast<double>(T);
}

bool is_binary(const OutcomeVector& y) {
  return std::none_of(y.begin(), y.end(), [](Outcome o) { return o == Outcome::erased; });
}

}  // namespace gtlab
