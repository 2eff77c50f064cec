#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace gtlab::lp {

enum class Sense { le, ge, eq };

struct Constraint {
  std::vector<std::pair<std::size_t, double>> terms;  // (variable, coefficient)
  Sense sense = Sense::ge;
  double rhs = 0.0;
};

// minimize cost . x  subject to rows, x >= 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> cost;
  std::vector<Constraint> rows;
};

enum class Status { optimal, infeasible, unbounded };

struct Options {
  double tolerance = 1e-9;
  // Consecutive degenerate pivots tolerated under Dantzig pricing before
  // switching to Bland's rule until the next improving pivot.
  std::size_t degenerate_switch = 30;
  std::size_t max_iterations = 0;  // 0 picks a size-based default
};

struct Result {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Dense two-phase tableau simplex. Throws SolverFailure when the iteration
// limit is reached.
Result solve(const Problem& problem, const Options& options = {});

// Largest violation of any constraint or bound by x.
double max_violation(const Problem& problem, const std::vector<double>& x);

}  // namespace gtlab::lp
