#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "gtlab/model.hpp"

namespace gtlab {

// Plain-text instance format: a "T n" header line, T lines of 0/1 characters
// (one row per test), then optionally one outcome line of 0/1/? characters.
struct Instance {
  TestMatrix X;
  std::optional<OutcomeVector> y;
};

Instance parse_instance(std::istream& in);
Instance read_instance(const std::string& path);
void write_instance(std::ostream& out, const TestMatrix& X, const OutcomeVector* y = nullptr);

// Accepts '0', '1', '?' and ignores whitespace and commas.
OutcomeVector parse_outcomes(const std::string& text);
OutcomeVector read_outcomes(const std::string& path);
std::string format_outcomes(const OutcomeVector& y);

}  // namespace gtlab
