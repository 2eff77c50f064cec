#include "gtlab/designs.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace gtlab {

namespace {

// Fills 64 cells at once: lane j is 1 iff U_j < p, comparing the uniforms
// U_j bit by bit against the binary expansion of p and stopping once every
// lane is decided. About log2(64) + 2 engine words per 64 cells.
class BitslicedBernoulli {
 public:
  explicit BitslicedBernoulli(double p) {
    double x = p;
    for (auto& b : bits_) {
      x *= 2.0;
      b = x >= 1.0;
      if (b) x -= 1.0;
    }
  }

  bits::Word operator()(Rng& rng, bits::Word lanes) const {
    bits::Word undecided = lanes, ones = 0;
    for (std::size_t i = 0; i < bits_.size() && undecided; ++i) {
      const bits::Word r = rng();
      if (bits_[i]) {
        ones |= undecided & ~r;
        undecided &= r;
      } else {
        undecided &= ~r;
      }
    }
    return ones;
  }

 private:
  std::array<bool, 53> bits_{};
};

}  // namespace

TestMatrix sample_bernoulli_design(std::size_t n, std::size_t T, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_bernoulli_design: p outside [0,1]");
  TestMatrixBuilder b(T, n);
  if (p == 0.0 || n == 0 || T == 0) return std::move(b).build();
  if (p == 1.0) {
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t i = 0; i < n; ++i) b.set(t, i);
    return std::move(b).build();
  }
  if (p >= kBitslicedMinP) {
    const BitslicedBernoulli draw(p);
    const std::size_t words = bits::words_for(n);
    const std::size_t tail = n % bits::kWordBits;
    const bits::Word last = tail ? (bits::Word{1} << tail) - 1 : ~bits::Word{0};
    for (std::size_t t = 0; t < T; ++t) {
      auto row = b.row(t);
      for (std::size_t w = 0; w < words; ++w) row[w] = draw(rng, w + 1 == words ? last : ~bits::Word{0});
    }
    return std::move(b).build();
  }
  // Walk the row-major cells, jumping over runs of zeros.
  const GeometricSkip skip(p);
  std::uint64_t word = 0;
  bool have_half = false;
  auto next32 = [&]() -> std::uint32_t {
    if (have_half) {
      have_half = false;
      return static_cast<std::uint32_t>(word >> 32);
    }
    word = rng();
    have_half = true;
    return static_cast<std::uint32_t>(word);
  };
  std::size_t row = 0, col = 0;
  while (true) {
    std::uint64_t gap = skip.draw32(next32);
    if (gap >= n - col) {
      gap -= n - col;
      col = 0;
      const std::uint64_t rows = gap / n;
      if (rows >= T - row - 1) break;
      row += static_cast<std::size_t>(rows) + 1;
      gap -= rows * n;
    }
    col += static_cast<std::size_t>(gap);
    b.set(row, col);
    if (++col == n) {
      col = 0;
      if (++row == T) break;
    }
  }
  return std::move(b).build();
}

TestMatrix sample_ncc_design(std::size_t n, std::size_t T, std::size_t L, Rng& rng) {
  if (T == 0 || L == 0) throw std::invalid_argument("sample_ncc_design: need T >= 1 and L >= 1");
  TestMatrixBuilder b(T, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < L; ++r) b.set(uniform_index(rng, T), i);
  return std::move(b).build();
}

TestMatrix individual_testing_design(std::size_t n) {
  if (n == 0) throw std::invalid_argument("individual_testing_design: n must be positive");
  return TestMatrix::identity(n);
}

std::size_t ncc_draws(double nu, std::size_t T, std::size_t k) {
  if (!(nu > 0.0) || k == 0) throw std::invalid_argument("ncc_draws: need nu > 0 and k >= 1");
  const double L = std::round(nu * static_cast<double>(T) / static_cast<double>(k));
  return L < 1.0 ? 1 : static_cast<std::size_t>(L);
}

TestMatrix sample_design(const DesignParams& params, std::size_t n, std::size_t T, Rng& rng) {
  switch (params.kind) {
    case DesignKind::bernoulli: {
      if (params.k_nominal == 0) throw std::invalid_argument("sample_design: k_nominal must be positive");
      const double p = params.nu / static_cast<double>(params.k_nominal);
      return sample_bernoulli_design(n, T, p, rng);
    }
    case DesignKind::near_constant_column:
      return sample_ncc_design(n, T, ncc_draws(params.nu, T, params.k_nominal), rng);
    case DesignKind::individual:
      return individual_testing_design(n);
  }
  throw std::invalid_argument("sample_design: unknown kind");
}

}  // namespace gtlab
