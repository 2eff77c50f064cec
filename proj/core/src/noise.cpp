#include "gtlab/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gtlab {

namespace {

void check_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

}  // namespace

NoiseModel NoiseModel::symmetric(double rho) {
  check_probability(rho, "symmetric noise rho");
  return {NoiseKind::symmetric, rho, 0.0};
}

NoiseModel NoiseModel::addition(double phi) {
  check_probability(phi, "addition noise phi");
  return {NoiseKind::addition, phi, 0.0};
}

NoiseModel NoiseModel::dilution(double theta) {
  check_probability(theta, "dilution noise theta");
  return {NoiseKind::dilution, theta, 0.0};
}

NoiseModel NoiseModel::z_channel(double theta) {
  check_probability(theta, "Z channel theta");
  return {NoiseKind::z, theta, 0.0};
}

NoiseModel NoiseModel::erasure(double xi) {
  check_probability(xi, "erasure xi");
  return {NoiseKind::erasure, xi, 0.0};
}

NoiseModel NoiseModel::threshold(double theta_lo, double theta_hi) {
  check_probability(theta_lo, "threshold theta_lo");
  check_probability(theta_hi, "threshold theta_hi");
  if (theta_lo > theta_hi) throw std::invalid_argument("threshold: theta_lo > theta_hi");
  return {NoiseKind::threshold, theta_lo, theta_hi};
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::noiseless: return "noiseless";
    case NoiseKind::symmetric: return "symmetric";
    case NoiseKind::addition: return "addition";
    case NoiseKind::dilution: return "dilution";
    case NoiseKind::z: return "z";
    case NoiseKind::erasure: return "erasure";
    case NoiseKind::threshold: return "threshold";
  }
  return "?";
}

NoiseKind parse_noise_kind(const std::string& s) {
  for (auto k : {NoiseKind::noiseless, NoiseKind::symmetric, NoiseKind::addition, NoiseKind::dilution,
                 NoiseKind::z, NoiseKind::erasure, NoiseKind::threshold})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown noise kind '" + s + "'");
}

std::string NoiseModel::name() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == NoiseKind::threshold) os << '(' << param << ',' << param2 << ')';
  else if (kind != NoiseKind::noiseless) os << '(' << param << ')';
  return os.str();
}

double transition_probability(const NoiseModel& model, Outcome y, std::size_t m, std::size_t l) {
  if (l > m) throw std::invalid_argument("transition_probability: l > m");
  if (y == Outcome::erased) {
    if (model.kind != NoiseKind::erasure)
      throw std::invalid_argument("transition_probability: '?' outside the alphabet of " + model.name());
    return model.param;
  }
  double p1 = 0.0;
  double scale = 1.0;
  switch (model.kind) {
    case NoiseKind::noiseless:
      p1 = l >= 1 ? 1.0 : 0.0;
      break;
    case NoiseKind::symmetric:
      p1 = l >= 1 ? 1.0 - model.param : model.param;
      break;
    case NoiseKind::addition:
      p1 = l >= 1 ? 1.0 : model.param;
      break;
    case NoiseKind::dilution:
      p1 = 1.0 - std::pow(model.param, static_cast<double>(l));
      break;
    case NoiseKind::z:
      p1 = l >= 1 ? 1.0 - model.param : 0.0;
      break;
    case NoiseKind::erasure:
      p1 = l >= 1 ? 1.0 : 0.0;
      scale = 1.0 - model.param;
      break;
    case NoiseKind::threshold: {
      const double md = static_cast<double>(m);
      const double ld = static_cast<double>(l);
      if (m == 0) p1 = 0.0;
      else if (ld >= model.param2 * md) p1 = 1.0;
      else if (ld <= model.param * md) p1 = 0.0;
      else p1 = 0.5;
      break;
    }
  }
  return scale * (y == Outcome::positive ? p1 : 1.0 - p1);
}

OutcomeVector sample_outcomes(const TestMatrix& X, const DefectiveSet& K, const NoiseModel& model,
                              Rng& rng) {
  if (model.kind == NoiseKind::noiseless) return noiseless_outcomes(X, K);
  const auto kbits = indicator_bits(K, X.num_items());
  OutcomeVector y(X.num_tests());
  for (std::size_t t = 0; t < X.num_tests(); ++t) {
    const std::size_t l = bits::count_and(X.row(t), kbits);
    const std::size_t m = model.only_defects_matter() ? l : X.row_weight(t);
    const double u = uniform01(rng);
    const double p_erased = model.has_erasures() ? model.param : 0.0;
    if (u < p_erased) {
      y[t] = Outcome::erased;
    } else {
      const double p1 = transition_probability(model, Outcome::positive, m, l);
      y[t] = u - p_erased < p1 ? Outcome::positive : Outcome::negative;
    }
  }
  return y;
}

}  // namespace gtlab
