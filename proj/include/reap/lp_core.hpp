#pragma once

// Dense two-phase tableau simplex for small maximization problems.
//
// Problems are stated as
//
//   maximize    c . x
//   subject to  a_k . x  (= or <=)  b_k
//               x >= 0
//
// The tableau keeps its objective row last. The entering column is the one
// with the largest positive reduced cost; a run ends when every entry of the
// objective row is non-positive.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reap {

enum class ConstraintSense { kEqual, kLessEqual };

struct LinearConstraint {
  std::vector<double> coeffs;
  ConstraintSense sense = ConstraintSense::kLessEqual;
  double rhs = 0.0;
};

struct StandardFormLP {
  std::vector<double> objective;
  std::vector<LinearConstraint> constraints;

  std::size_t num_vars() const { return objective.size(); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(LpStatus status);

/// One pivot of a solve, as recorded in the optional trace.
struct PivotStep {
  std::size_t iteration = 0;
  int phase = 2;
  std::size_t col = 0;
  std::size_t row = 0;
  double objective = 0.0;
  bool bland = false;
};

struct LPSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> values;  // empty unless a feasible iterate exists
  double objective = 0.0;
  std::size_t iterations = 0;
  std::vector<PivotStep> trace;  // filled only when requested
};

/// Thrown for malformed input (ragged rows, non-finite data, no constraints).
class LpDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by pivot() when the pivot element is numerically zero.
class NumericalPivotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { kStructural, kSlack, kArtificial };

inline constexpr double kPivotTolerance = 1e-12;
inline constexpr double kOptimalityTolerance = 1e-12;
inline constexpr double kFeasibilityTolerance = 1e-9;

// Row-major dense tableau. Rows [0, num_rows()) are constraints, row
// num_rows() is the objective row. Column num_cols() holds the right-hand
// side. The objective-row rhs cell stores the negated objective value.
class Tableau {
 public:
  Tableau() = default;
  Tableau(std::size_t num_rows, std::size_t num_cols);

  std::size_t num_rows() const { return rows_; }
  std::size_t num_cols() const { return cols_; }

  double& at(std::size_t row, std::size_t col) { return data_[row * (cols_ + 1) + col]; }
  double at(std::size_t row, std::size_t col) const { return data_[row * (cols_ + 1) + col]; }

  double& rhs(std::size_t row) { return at(row, cols_); }
  double rhs(std::size_t row) const { return at(row, cols_); }

  double& reduced_cost(std::size_t col) { return at(rows_, col); }
  double reduced_cost(std::size_t col) const { return at(rows_, col); }

  double objective_value() const { return -at(rows_, cols_); }

  /// Basic variable of each constraint row.
  std::vector<std::size_t> basis;
  std::vector<ColumnKind> kinds;
  /// Columns that may never enter the basis (artificials during phase 2).
  std::vector<bool> barred;
  std::size_t iterations = 0;

  std::size_t count(ColumnKind kind) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Rejects ragged or non-finite problems; throws LpDimensionError.
void check_lp(const StandardFormLP& lp);

/// Builds the initial tableau: structural columns, one slack per LE row,
/// one artificial per row that cannot start on a slack. When artificials
/// exist the objective row holds the phase-1 objective (maximize minus the
/// artificial sum), otherwise the real objective.
Tableau add_slacks(const StandardFormLP& lp);

/// Largest positive reduced cost, ties to the lowest column.
std::optional<std::size_t> find_pivot_col(const Tableau& tableau);

/// Lowest-index column with a positive reduced cost.
std::optional<std::size_t> find_pivot_col_bland(const Tableau& tableau);

/// Minimum-ratio test over rows with a positive entry in `col`, ties to the
/// lowest row. std::nullopt means the column is unbounded.
std::optional<std::size_t> find_pivot_row(const Tableau& tableau, std::size_t col);

/// Gauss-Jordan step making `col` a unit column with its 1 in `row`.
void pivot(Tableau& tableau, std::size_t row, std::size_t col);

struct SolveOptions {
  /// 0 selects the default of 50 * (variables + constraints).
  std::size_t max_iterations = 0;
  /// Switch to Bland's rule after a run of degenerate pivots.
  bool anti_cycling = true;
  bool record_trace = false;
};

std::size_t default_max_iterations(const StandardFormLP& lp);

LPSolution solve_lp(const StandardFormLP& lp, const SolveOptions& options = {});
LPSolution solve_lp(const StandardFormLP& lp, std::size_t max_iterations);

/// One line per pivot: iteration, phase, pivot column, pivot row, objective.
void write_trace(std::ostream& os, const std::vector<PivotStep>& trace);

}  // namespace reap
