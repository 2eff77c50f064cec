#include "gtlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gtlab/errors.hpp"

namespace gtlab::lp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), stride_(cols + 1), a_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * stride_ + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * stride_ + c]; }
  double& rhs(std::size_t r) { return a_[r * stride_ + n_]; }
  double rhs(std::size_t r) const { return a_[r * stride_ + n_]; }
  double* obj() { return a_.data() + m_ * stride_; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    double* pr = a_.data() + r * stride_;
    const double inv = 1.0 / pr[c];
    nz_.clear();
    for (std::size_t j = 0; j <= n_; ++j) {
      if (pr[j] != 0.0) {
        pr[j] *= inv;
        nz_.push_back(j);
      }
    }
    pr[c] = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* pi = a_.data() + i * stride_;
      const double f = pi[c];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) {
        double v = pi[j] - f * pr[j];
        if (std::abs(v) < 1e-13) v = 0.0;
        pi[j] = v;
      }
      pi[c] = 0.0;
    }
    basis_[r] = c;
  }

 private:
  std::size_t m_, n_, stride_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
};

enum class Run { optimal, unbounded };

// Minimizes the objective row over columns [0, allowed). The objective row
// holds reduced costs and, in the rhs slot, minus the objective value.
Run run_simplex(Tableau& tb, std::size_t allowed, const Options& opt, std::size_t& iterations,
                std::size_t limit) {
  const double tol = opt.tolerance;
  std::size_t degenerate = 0;
  bool bland = false;
  while (true) {
    if (iterations >= limit) throw SolverFailure("simplex: iteration limit reached");
    const double* d = tb.obj();
    std::size_t enter = allowed;
    if (bland) {
      for (std::size_t j = 0; j < allowed; ++j)
        if (d[j] < -tol) { enter = j; break; }
    } else {
      double best = -tol;
      for (std::size_t j = 0; j < allowed; ++j)
        if (d[j] < best) { best = d[j]; enter = j; }
    }
    if (enter == allowed) return Run::optimal;

    std::size_t leave = tb.rows();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < tb.rows(); ++r) {
      const double a = tb.at(r, enter);
      if (a <= tol) continue;
      const double ratio = std::max(tb.rhs(r), 0.0) / a;
      bool take = ratio < best_ratio - 1e-12;
      if (!take && leave < tb.rows() && ratio <= best_ratio + 1e-12)
        take = bland ? tb.basis()[r] < tb.basis()[leave] : a > tb.at(leave, enter);
      if (take) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == tb.rows()) return Run::unbounded;

    if (best_ratio <= 0.0) {
      if (++degenerate > opt.degenerate_switch) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
    tb.pivot(leave, enter);
    ++iterations;
  }
}

void load_objective(Tableau& tb, const std::vector<double>& cost) {
  double* d = tb.obj();
  std::fill(d, d + tb.cols() + 1, 0.0);
  for (std::size_t j = 0; j < cost.size(); ++j) d[j] = cost[j];
  for (std::size_t r = 0; r < tb.rows(); ++r) {
    const double cb = tb.basis()[r] < cost.size() ? cost[tb.basis()[r]] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= tb.cols(); ++j) d[j] -= cb * tb.at(r, j);
  }
}

// Restores primal feasibility from a dual-feasible basis. Returns false if
// some row proves the problem infeasible.
bool run_dual_simplex(Tableau& tb, std::size_t allowed, const Options& opt, std::size_t& iterations,
                      std::size_t limit) {
  const double tol = opt.tolerance;
  while (true) {
    if (iterations >= limit) throw SolverFailure("simplex: iteration limit reached");
    std::size_t leave = tb.rows();
    double worst = -tol;
    for (std::size_t r = 0; r < tb.rows(); ++r)
      if (tb.rhs(r) < worst) {
        worst = tb.rhs(r);
        leave = r;
      }
    if (leave == tb.rows()) return true;
    const double* d = tb.obj();
    std::size_t enter = allowed;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < allowed; ++j) {
      const double a = tb.at(leave, j);
      if (a >= -tol) continue;
      const double ratio = std::max(d[j], 0.0) / -a;
      if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && enter < allowed && a < tb.at(leave, enter))) {
        best = ratio;
        enter = j;
      }
    }
    if (enter == allowed) return false;
    tb.pivot(leave, enter);
    ++iterations;
  }
}

}  // namespace

Result solve(const Problem& problem, const Options& opt) {
  const std::size_t nv = problem.num_vars;
  const std::size_t m = problem.rows.size();
  if (problem.cost.size() != nv) throw std::invalid_argument("lp::solve: cost size mismatch");

  // Normalize to nonnegative right-hand sides.
  std::vector<Sense> sense(m);
  std::vector<double> sign(m, 1.0);
  for (std::size_t r = 0; r < m; ++r) {
    sense[r] = problem.rows[r].sense;
    if (problem.rows[r].rhs < 0.0) {
      sign[r] = -1.0;
      if (sense[r] == Sense::le) sense[r] = Sense::ge;
      else if (sense[r] == Sense::ge) sense[r] = Sense::le;
    }
    for (const auto& [j, a] : problem.rows[r].terms)
      if (j >= nv) throw std::invalid_argument("lp::solve: variable index out of range");
  }

  // A column of the original variables that is nonzero in exactly one row,
  // with a positive coefficient, can start in the basis for that row.
  std::vector<std::size_t> col_rows(nv, 0);
  std::vector<std::size_t> col_row(nv, m);
  std::vector<double> col_coef(nv, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    for (const auto& [j, a] : problem.rows[r].terms) {
      if (a == 0.0) continue;
      ++col_rows[j];
      col_row[j] = r;
      col_coef[j] = a * sign[r];
    }
  std::vector<std::size_t> crash(m, nv);
  for (std::size_t j = 0; j < nv; ++j)
    if (col_rows[j] == 1 && col_coef[j] > 0.0 && crash[col_row[j]] == nv &&
        sense[col_row[j]] != Sense::le)
      crash[col_row[j]] = j;

  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] != Sense::eq) ++n_slack;
    if (sense[r] != Sense::le && crash[r] == nv) ++n_art;
  }
  const std::size_t real_cols = nv + n_slack;
  // The last column shadows the right-hand side through phase 2, which runs
  // on a perturbed right-hand side to avoid stalling on degenerate vertices.
  const std::size_t shadow = real_cols + n_art;
  Tableau tb(m, shadow + 1);

  std::size_t slack = nv;
  std::size_t art = real_cols;
  for (std::size_t r = 0; r < m; ++r) {
    for (const auto& [j, a] : problem.rows[r].terms) tb.at(r, j) += a * sign[r];
    tb.rhs(r) = problem.rows[r].rhs * sign[r];
    if (sense[r] == Sense::le) {
      tb.at(r, slack) = 1.0;
      tb.basis()[r] = slack++;
      continue;
    }
    if (sense[r] == Sense::ge) tb.at(r, slack++) = -1.0;
    if (crash[r] != nv) {
      const double a = tb.at(r, crash[r]);
      for (std::size_t j = 0; j <= tb.cols(); ++j) tb.at(r, j) /= a;
      tb.basis()[r] = crash[r];
    } else {
      tb.at(r, art) = 1.0;
      tb.basis()[r] = art++;
    }
  }

  const std::size_t limit =
      opt.max_iterations ? opt.max_iterations : 200 * (m + tb.cols()) + 10000;
  Result res;

  if (n_art > 0) {
    std::vector<double> phase1(tb.cols(), 0.0);
    for (std::size_t j = real_cols; j < shadow; ++j) phase1[j] = 1.0;
    load_objective(tb, phase1);
    run_simplex(tb, shadow, opt, res.iterations, limit);
    double scale = 1.0;
    for (std::size_t r = 0; r < m; ++r) scale = std::max(scale, std::abs(problem.rows[r].rhs));
    if (-tb.obj()[tb.cols()] > 1e-8 * scale) {
      res.status = Status::infeasible;
      return res;
    }
    // Pivot artificials out of the basis where possible; rows where that
    // fails are redundant and keep a zero-valued artificial.
    for (std::size_t r = 0; r < m; ++r) {
      if (tb.basis()[r] < real_cols) continue;
      std::size_t best = real_cols;
      double best_abs = opt.tolerance;
      for (std::size_t j = 0; j < real_cols; ++j)
        if (std::abs(tb.at(r, j)) > best_abs) { best_abs = std::abs(tb.at(r, j)); best = j; }
      if (best < real_cols) tb.pivot(r, best);
    }
  }

  std::vector<double> cost(tb.cols(), 0.0);
  std::copy(problem.cost.begin(), problem.cost.end(), cost.begin());
  load_objective(tb, cost);
  double scale = 1.0;
  for (std::size_t r = 0; r < m; ++r) scale = std::max(scale, std::abs(tb.rhs(r)));
  for (std::size_t r = 0; r < m; ++r) {
    tb.at(r, shadow) = tb.rhs(r);
    // Distinct deterministic offsets in (1, 2) x 1e-7 x scale.
    const double u = std::fmod(0.6180339887498949 * static_cast<double>(r + 1), 1.0);
    tb.rhs(r) += 1e-7 * scale * (1.0 + u);
  }
  if (run_simplex(tb, real_cols, opt, res.iterations, limit) == Run::unbounded) {
    res.status = Status::unbounded;
    return res;
  }
  for (std::size_t r = 0; r < m; ++r) tb.rhs(r) = tb.at(r, shadow);
  if (!run_dual_simplex(tb, real_cols, opt, res.iterations, limit)) {
    res.status = Status::infeasible;
    return res;
  }

  res.status = Status::optimal;
  res.x.assign(nv, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (tb.basis()[r] < nv) res.x[tb.basis()[r]] = std::max(0.0, tb.rhs(r));
  res.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j) res.objective += problem.cost[j] * res.x[j];
  return res;
}

double max_violation(const Problem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const auto& row : problem.rows) {
    double s = 0.0;
    for (const auto& [j, a] : row.terms) s += a * x[j];
    const double diff = s - row.rhs;
    if (row.sense == Sense::le) worst = std::max(worst, diff);
    else if (row.sense == Sense::ge) worst = std::max(worst, -diff);
    else worst = std::max(worst, std::abs(diff));
  }
  return worst;
}

}  // namespace gtlab::lp
