#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>

namespace gtlab::bits {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t nbits) {
  return (nbits + kWordBits - 1) / kWordBits;
}

inline bool test(std::span<const Word> w, std::size_t i) {
  return (w[i / kWordBits] >> (i % kWordBits)) & 1U;
}

inline void set(std::span<Word> w, std::size_t i) {
  w[i / kWordBits] |= Word{1} << (i % kWordBits);
}

inline void reset(std::span<Word> w, std::size_t i) {
  w[i / kWordBits] &= ~(Word{1} << (i % kWordBits));
}

inline std::size_t count(std::span<const Word> w) {
  std::size_t c = 0;
  for (Word x : w) c += static_cast<std::size_t>(std::popcount(x));
  return c;
}

inline std::size_t count_and(std::span<const Word> a, std::span<const Word> b) {
  std::size_t c = 0;
  for (std::size_t j = 0; j < a.size(); ++j) c += static_cast<std::size_t>(std::popcount(a[j] & b[j]));
  return c;
}

inline bool intersects(std::span<const Word> a, std::span<const Word> b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] & b[j]) return true;
  return false;
}

template <class F>
void for_each(std::span<const Word> w, F&& f) {
  for (std::size_t j = 0; j < w.size(); ++j) {
    Word x = w[j];
    while (x) {
      f(j * kWordBits + static_cast<std::size_t>(std::countr_zero(x)));
      x &= x - 1;
    }
  }
}

template <class F>
void for_each_and(std::span<const Word> a, std::span<const Word> b, F&& f) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    Word x = a[j] & b[j];
    while (x) {
      f(j * kWordBits + static_cast<std::size_t>(std::countr_zero(x)));
      x &= x - 1;
    }
  }
}

}  // namespace gtlab::bits
