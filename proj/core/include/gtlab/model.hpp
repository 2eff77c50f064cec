#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "gtlab/bits.hpp"
#include "gtlab/rng.hpp"

namespace gtlab {

using Item = std::uint32_t;

enum class Outcome : std::uint8_t { negative = 0, positive = 1, erased = 2 };
using OutcomeVector = std::vector<Outcome>;

// Sorted, duplicate-free set of item indices.
class DefectiveSet {
 public:
  DefectiveSet() = default;
  DefectiveSet(std::initializer_list<Item> items);

  // Sorts the input; duplicates raise std::invalid_argument.
  static DefectiveSet from_items(std::vector<Item> items);
  // Input must already be strictly increasing (checked).
  static DefectiveSet from_sorted(std::vector<Item> items);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  bool contains(Item i) const;
  const std::vector<Item>& items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  // Throws std::invalid_argument if any index is >= n.
  void check_range(std::size_t n) const;

  friend bool operator==(const DefectiveSet&, const DefectiveSet&) = default;

 private:
  std::vector<Item> items_;
};

class TestMatrixBuilder;

// Binary T x n inclusion matrix. Rows and columns are both kept as packed
// bitsets, so membership is O(1) and either direction can be iterated.
class TestMatrix {
 public:
  TestMatrix() = default;

  static TestMatrix from_rows(const std::vector<std::string>& rows);
  static TestMatrix identity(std::size_t n);

  std::size_t num_tests() const { return tests_; }
  std::size_t num_items() const { return items_; }
  std::size_t row_words() const { return row_words_; }
  std::size_t column_words() const { return col_words_; }

  bool contains(std::size_t t, std::size_t i) const {
    return bits::test(row(t), i);
  }
  std::span<const bits::Word> row(std::size_t t) const {
    return {rows_.data() + t * row_words_, row_words_};
  }
  // Columns are transposed from the rows on first use.
  std::span<const bits::Word> column(std::size_t i) const {
    return {columns().data() + i * col_words_, col_words_};
  }
  std::size_t row_weight(std::size_t t) const { return bits::count(row(t)); }
  std::size_t column_weight(std::size_t i) const { return bits::count(column(i)); }

  template <class F>
  void for_each_in_row(std::size_t t, F&& f) const {
    bits::for_each(row(t), f);
  }
  template <class F>
  void for_each_in_column(std::size_t i, F&& f) const {
    bits::for_each(column(i), f);
  }

  // Submatrix made of the given rows, in the given order.
  TestMatrix select_rows(std::span<const std::size_t> rows) const;

  std::string row_string(std::size_t t) const;

  friend bool operator==(const TestMatrix& a, const TestMatrix& b) {
    return a.tests_ == b.tests_ && a.items_ == b.items_ && a.rows_ == b.rows_;
  }

 private:
  friend class TestMatrixBuilder;

  std::size_t tests_ = 0;
  std::size_t items_ = 0;
  std::size_t row_words_ = 0;
  std::size_t col_words_ = 0;
  std::vector<bits::Word> rows_;

  struct ColumnCache {
    std::once_flag once;
    std::vector<bits::Word> words;
  };
  const std::vector<bits::Word>& columns() const;
  std::shared_ptr<ColumnCache> cols_ = std::make_shared<ColumnCache>();
};

class TestMatrixBuilder {
 public:
  TestMatrixBuilder(std::size_t tests, std::size_t items);

  void set(std::size_t t, std::size_t i) {
    bits::set(std::span<bits::Word>(rows_.data() + t * row_words_, row_words_), i);
  }
  bool get(std::size_t t, std::size_t i) const {
    return bits::test(std::span<const bits::Word>(rows_.data() + t * row_words_, row_words_), i);
  }
  std::span<bits::Word> row(std::size_t t) {
    return {rows_.data() + t * row_words_, row_words_};
  }
  std::size_t num_tests() const { return tests_; }
  std::size_t num_items() const { return items_; }

  TestMatrix build() &&;

 private:
  std::size_t tests_;
  std::size_t items_;
  std::size_t row_words_;
  std::vector<bits::Word> rows_;
};

struct RecoveryReport {
  bool exact = false;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  bool success = false;  // fp <= d and fn <= d
};

DefectiveSet sample_defective_set_combinatorial(std::size_t n, std::size_t k, Rng& rng);
DefectiveSet sample_defective_set_iid(std::size_t n, double q, Rng& rng);

OutcomeVector noiseless_outcomes(const TestMatrix& X, const DefectiveSet& K);

RecoveryReport evaluate_recovery(const DefectiveSet& truth, const DefectiveSet& estimate,
                                 std::size_t d = 0);

// log2 C(n, k).
double log_binomial(std::size_t n, std::size_t k);
// log2 C(n, k) / T bits per test.
double rate(std::size_t n, std::size_t k, std::size_t T);

// Packed indicator vector of a set over n items.
std::vector<bits::Word> indicator_bits(const DefectiveSet& K, std::size_t n);

bool is_binary(const OutcomeVector& y);

}  // namespace gtlab
