#include "reap/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace reap {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

Tableau::Tableau(std::size_t num_rows, std::size_t num_cols)
    : basis(num_rows, 0),
      kinds(num_cols, ColumnKind::kStructural),
      barred(num_cols, false),
      rows_(num_rows),
      cols_(num_cols),
      data_((num_rows + 1) * (num_cols + 1), 0.0) {}

std::size_t Tableau::count(ColumnKind kind) const {
  return static_cast<std::size_t>(std::count(kinds.begin(), kinds.end(), kind));
}

void check_lp(const StandardFormLP& lp) {
  const std::size_t n = lp.num_vars();
  if (n == 0) throw LpDimensionError("LP has no variables");
  if (lp.constraints.empty()) throw LpDimensionError("LP has no constraints");
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw LpDimensionError("non-finite objective coefficient");
  }
  for (std::size_t k = 0; k < lp.constraints.size(); ++k) {
    const auto& row = lp.constraints[k];
    if (row.coeffs.size() != n) {
      throw LpDimensionError("constraint " + std::to_string(k) + " has " +
                             std::to_string(row.coeffs.size()) + " coefficients, expected " +
                             std::to_string(n));
    }
    if (!std::isfinite(row.rhs)) {
      throw LpDimensionError("constraint " + std::to_string(k) + " has a non-finite rhs");
    }
    for (double a : row.coeffs) {
      if (!std::isfinite(a)) {
        throw LpDimensionError("constraint " + std::to_string(k) + " has a non-finite coefficient");
      }
    }
  }
}

Tableau add_slacks(const StandardFormLP& lp) {
  check_lp(lp);
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.constraints.size();

  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  for (const auto& row : lp.constraints) {
    if (row.sense == ConstraintSense::kLessEqual) ++num_slack;
    // a LE row with negative rhs is flipped and cannot start on its slack
    if (row.sense == ConstraintSense::kEqual || row.rhs < 0.0) ++num_art;
  }

  Tableau t(m, n + num_slack + num_art);
  for (std::size_t j = n; j < n + num_slack; ++j) t.kinds[j] = ColumnKind::kSlack;
  for (std::size_t j = n + num_slack; j < t.num_cols(); ++j) t.kinds[j] = ColumnKind::kArtificial;

  std::size_t next_slack = n;
  std::size_t next_art = n + num_slack;
  std::vector<std::size_t> art_rows;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.constraints[i];
    const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * row.coeffs[j];
    t.rhs(i) = sign * row.rhs;

    bool needs_art = row.sense == ConstraintSense::kEqual;
    if (row.sense == ConstraintSense::kLessEqual) {
      const std::size_t s = next_slack++;
      t.at(i, s) = sign;
      if (sign > 0.0) {
        t.basis[i] = s;
      } else {
        needs_art = true;
      }
    }
    if (needs_art) {
      const std::size_t a = next_art++;
      t.at(i, a) = 1.0;
      t.basis[i] = a;
      art_rows.push_back(i);
    }
  }

  if (art_rows.empty()) {
    for (std::size_t j = 0; j < n; ++j) t.reduced_cost(j) = lp.objective[j];
  } else {
    // maximize -(sum of artificials), priced out against the artificial basis
    for (std::size_t i : art_rows) {
      for (std::size_t j = 0; j < t.num_cols(); ++j) {
        if (t.kinds[j] != ColumnKind::kArtificial) t.at(m, j) += t.at(i, j);
      }
      t.rhs(m) += t.rhs(i);
    }
  }
  return t;
}

std::optional<std::size_t> find_pivot_col(const Tableau& tableau) {
  std::optional<std::size_t> best;
  double best_value = kOptimalityTolerance;
  for (std::size_t j = 0; j < tableau.num_cols(); ++j) {
    if (tableau.barred[j]) continue;
    const double r = tableau.reduced_cost(j);
    if (r > best_value) {
      best_value = r;
      best = j;
    }
  }
  return best;
}

std::optional<std::size_t> find_pivot_col_bland(const Tableau& tableau) {
  for (std::size_t j = 0; j < tableau.num_cols(); ++j) {
    if (!tableau.barred[j] && tableau.reduced_cost(j) > kOptimalityTolerance) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> find_pivot_row(const Tableau& tableau, std::size_t col) {
  std::optional<std::size_t> best;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tableau.num_rows(); ++i) {
    const double a = tableau.at(i, col);
    if (a <= kPivotTolerance) continue;
    const double ratio = std::max(tableau.rhs(i), 0.0) / a;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  return best;
}

namespace {

// Ratio ties go to the row whose basic variable has the lowest index, which
// together with lowest-index entering columns rules out cycling.
std::optional<std::size_t> find_pivot_row_bland(const Tableau& tableau, std::size_t col) {
  std::optional<std::size_t> best;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tableau.num_rows(); ++i) {
    const double a = tableau.at(i, col);
    if (a <= kPivotTolerance) continue;
    const double ratio = std::max(tableau.rhs(i), 0.0) / a;
    if (ratio < best_ratio || (ratio == best_ratio && tableau.basis[i] < tableau.basis[*best])) {
      best_ratio = ratio;
      best = i;
    }
  }
  return best;
}

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

PhaseResult run_phase(Tableau& t, int phase, const SolveOptions& options, std::size_t max_iterations,
                      std::vector<PivotStep>* trace) {
  const std::size_t degenerate_limit = 2 * (t.num_rows() + t.num_cols());
  std::size_t degenerate_run = 0;
  bool bland = false;

  while (true) {
    const auto col = bland ? find_pivot_col_bland(t) : find_pivot_col(t);
    if (!col) return PhaseResult::kOptimal;
    if (t.iterations >= max_iterations) return PhaseResult::kIterationLimit;

    const auto row = bland ? find_pivot_row_bland(t, *col) : find_pivot_row(t, *col);
    if (!row) return PhaseResult::kUnbounded;

    const double before = t.objective_value();
    pivot(t, *row, *col);
    ++t.iterations;
    const double after = t.objective_value();

    if (trace != nullptr) trace->push_back({t.iterations, phase, *col, *row, after, bland});

    if (after - before < kOptimalityTolerance) {
      if (++degenerate_run >= degenerate_limit && options.anti_cycling) bland = true;
    } else {
      degenerate_run = 0;
    }
  }
}

// Pivots zero-level artificials out of the basis wherever a non-artificial
// column has a usable entry. Rows with none are redundant and keep their
// artificial basic at zero; barring the column keeps it there.
void drive_out_artificials(Tableau& t) {
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    if (t.kinds[t.basis[i]] != ColumnKind::kArtificial) continue;
    std::optional<std::size_t> best;
    double best_mag = kFeasibilityTolerance;
    for (std::size_t j = 0; j < t.num_cols(); ++j) {
      if (t.kinds[j] == ColumnKind::kArtificial) continue;
      const double mag = std::abs(t.at(i, j));
      if (mag > best_mag) {
        best_mag = mag;
        best = j;
      }
    }
    if (best) pivot(t, i, *best);
  }
  for (std::size_t j = 0; j < t.num_cols(); ++j) {
    if (t.kinds[j] == ColumnKind::kArtificial) t.barred[j] = true;
  }
}

void load_objective(Tableau& t, const std::vector<double>& cost) {
  const std::size_t m = t.num_rows();
  auto column_cost = [&](std::size_t j) { return j < cost.size() ? cost[j] : 0.0; };
  for (std::size_t j = 0; j <= t.num_cols(); ++j) t.at(m, j) = 0.0;
  for (std::size_t j = 0; j < t.num_cols(); ++j) t.at(m, j) = column_cost(j);
  for (std::size_t i = 0; i < m; ++i) {
    const double cb = column_cost(t.basis[i]);
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= t.num_cols(); ++j) t.at(m, j) -= cb * t.at(i, j);
  }
}

std::vector<double> extract_values(const Tableau& t, std::size_t n) {
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    if (t.basis[i] < n) x[t.basis[i]] = t.rhs(i);
  }
  return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void pivot(Tableau& t, std::size_t row, std::size_t col) {
  const double p = t.at(row, col);
  if (!(std::abs(p) >= kPivotTolerance)) {
    throw NumericalPivotError("pivot element " + std::to_string(p) + " at (" + std::to_string(row) +
                              ", " + std::to_string(col) + ") is numerically zero");
  }
  const std::size_t width = t.num_cols() + 1;
  for (std::size_t j = 0; j < width; ++j) t.at(row, j) /= p;
  t.at(row, col) = 1.0;

  for (std::size_t i = 0; i <= t.num_rows(); ++i) {
    if (i == row) continue;
    const double factor = t.at(i, col);
    if (factor == 0.0) continue;
    for (std::size_t j = 0; j < width; ++j) t.at(i, j) -= factor * t.at(row, j);
    t.at(i, col) = 0.0;
  }
  t.basis[row] = col;
}

std::size_t default_max_iterations(const StandardFormLP& lp) {
  return 50 * (lp.num_vars() + lp.constraints.size());
}

LPSolution solve_lp(const StandardFormLP& lp, std::size_t max_iterations) {
  SolveOptions options;
  options.max_iterations = max_iterations;
  return solve_lp(lp, options);
}

LPSolution solve_lp(const StandardFormLP& lp, const SolveOptions& options) {
  Tableau t = add_slacks(lp);
  const std::size_t n = lp.num_vars();
  const std::size_t max_iterations =
      options.max_iterations == 0 ? default_max_iterations(lp) : options.max_iterations;

  LPSolution solution;
  std::vector<PivotStep>* trace = options.record_trace ? &solution.trace : nullptr;

  if (t.count(ColumnKind::kArtificial) > 0) {
    const PhaseResult phase1 = run_phase(t, 1, options, max_iterations, trace);
    solution.iterations = t.iterations;
    if (phase1 == PhaseResult::kIterationLimit) {
      solution.status = LpStatus::kIterationLimit;
      return solution;
    }
    double scale = 1.0;
    for (const auto& row : lp.constraints) scale = std::max(scale, std::abs(row.rhs));
    if (t.objective_value() < -kFeasibilityTolerance * scale) {
      solution.status = LpStatus::kInfeasible;
      return solution;
    }
    drive_out_artificials(t);
  }

  load_objective(t, lp.objective);
  const PhaseResult phase2 = run_phase(t, 2, options, max_iterations, trace);
  solution.iterations = t.iterations;

  switch (phase2) {
    case PhaseResult::kUnbounded:
      solution.status = LpStatus::kUnbounded;
      return solution;
    case PhaseResult::kIterationLimit:
      solution.status = LpStatus::kIterationLimit;
      break;
    case PhaseResult::kOptimal:
      solution.status = LpStatus::kOptimal;
      break;
  }
  solution.values = extract_values(t, n);
  solution.objective = dot(lp.objective, solution.values);
  return solution;
}

void write_trace(std::ostream& os, const std::vector<PivotStep>& trace) {
  for (const auto& step : trace) {
    os << step.iteration << " phase=" << step.phase << " col=" << step.col << " row=" << step.row
       << " objective=" << step.objective << (step.bland ? " bland" : "") << '\n';
  }
}

}  // namespace reap
