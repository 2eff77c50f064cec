#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gtlab/model.hpp"
#include "gtlab/noise.hpp"

namespace gtlab {

// All decoders in this header take binary outcomes and throw
// std::invalid_argument if y contains an erasure or has the wrong length.

bool is_satisfying(const TestMatrix& X, const OutcomeVector& y, const DefectiveSet& L);

// Items that appear in no negative test (possible defectives), packed.
std::vector<bits::Word> possible_defectives(const TestMatrix& X, const OutcomeVector& y);

DefectiveSet comp(const TestMatrix& X, const OutcomeVector& y);
DefectiveSet dd(const TestMatrix& X, const OutcomeVector& y);
DefectiveSet scomp(const TestMatrix& X, const OutcomeVector& y);

inline constexpr std::size_t kDefaultSssCap = 40;

// Smallest satisfying set, lexicographically smallest among ties. Throws
// ResourceLimitError if there are more than `cap` possible defectives, and
// std::invalid_argument if no satisfying set exists.
DefectiveSet sss_exact(const TestMatrix& X, const OutcomeVector& y, std::size_t cap = kDefaultSssCap);

enum class LpRounding { strict_positive, half };

struct LpSolution {
  enum class Status { optimal, infeasible };
  std::vector<double> z;  // length n
  double objective = 0.0;
  Status status = Status::infeasible;
};

// min sum z  s.t.  sum_{i in t} z_i >= 1 on positive tests, = 0 on negative
// tests, z >= 0.
LpSolution lp_relaxation(const TestMatrix& X, const OutcomeVector& y);
DefectiveSet round_lp(const std::vector<double>& z, LpRounding rounding);
// Throws SolverFailure if the relaxation is infeasible.
DefectiveSet lp_decode(const TestMatrix& X, const OutcomeVector& y,
                       LpRounding rounding = LpRounding::strict_positive);

inline constexpr double kMlOracleLimit = 1e7;

// Maximum likelihood over all k-sets; ties go to the lexicographically
// smallest. Throws ResourceLimitError when C(n,k) > 1e7.
DefectiveSet ml_oracle(const TestMatrix& X, const OutcomeVector& y, std::size_t k,
                       const NoiseModel& model);

// Log-likelihood sum_t ln p(y_t | m_t, l_t(L)), accumulated in test order.
double log_likelihood(const TestMatrix& X, const OutcomeVector& y, const DefectiveSet& L,
                      const NoiseModel& model);

enum class NoiselessDecoder { comp, dd, scomp, sss, lp_strict, lp_half };

NoiselessDecoder parse_noiseless_decoder(const std::string& id);
std::string to_string(NoiselessDecoder id);
DefectiveSet decode_noiseless(NoiselessDecoder id, const TestMatrix& X, const OutcomeVector& y,
                              std::size_t sss_cap = kDefaultSssCap);

}  // namespace gtlab
