#pragma once

#include <cstddef>
#include <string>

#include "gtlab/model.hpp"
#include "gtlab/rng.hpp"

namespace gtlab {

enum class NoiseKind { noiseless, symmetric, addition, dilution, z, erasure, threshold };

// Transition law p(y | m, l) for a test with m items of which l are defective.
// `param` holds rho, phi, theta or xi; threshold uses (param, param2) as
// (theta_lo, theta_hi).
struct NoiseModel {
  NoiseKind kind = NoiseKind::noiseless;
  double param = 0.0;
  double param2 = 0.0;

  static NoiseModel noiseless() { return {}; }
  static NoiseModel symmetric(double rho);
  static NoiseModel addition(double phi);
  static NoiseModel dilution(double theta);
  static NoiseModel z_channel(double theta);
  static NoiseModel erasure(double xi);
  static NoiseModel threshold(double theta_lo, double theta_hi);

  bool only_defects_matter() const { return kind != NoiseKind::threshold; }
  bool has_erasures() const { return kind == NoiseKind::erasure; }
  std::string name() const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

NoiseKind parse_noise_kind(const std::string& s);
std::string to_string(NoiseKind kind);

// Throws std::invalid_argument for l > m or an outcome outside the alphabet.
double transition_probability(const NoiseModel& model, Outcome y, std::size_t m, std::size_t l);

OutcomeVector sample_outcomes(const TestMatrix& X, const DefectiveSet& K, const NoiseModel& model,
                              Rng& rng);

}  // namespace gtlab
