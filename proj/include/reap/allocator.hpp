#pragma once

// Per-period time allocation across design points.
//
//   maximize   J(t) = (1/T) * sum_i a_i^alpha * t_i
//   s.t.       t_off + sum_i t_i            = T
//              P_off * t_off + sum_i P_i t_i <= E
//              t >= 0
//
// optimize_allocation() solves this with the tableau simplex;
// envelope_oracle() solves it independently from the upper concave envelope
// of {(P_off, 0)} U {(P_i, a_i^alpha)}.

#include <string>
#include <vector>

#include "json.hpp"
#include "reap/catalog.hpp"
#include "reap/lp_core.hpp"

namespace reap {

struct AllocationProblem {
  double period = 3600.0;  // seconds
  double budget = 0.0;     // joules
  double alpha = 1.0;
  Catalog catalog;
};

struct DpTime {
  int id = 0;
  double seconds = 0.0;
};

struct Allocation {
  std::vector<DpTime> times;  // catalog order
  double off_time = 0.0;
  double objective = 0.0;
  double expected_accuracy = 0.0;
  double active_fraction = 0.0;
  double energy_used = 0.0;
  LpStatus status = LpStatus::kOptimal;
  std::size_t iterations = 0;

  bool ok() const { return status == LpStatus::kOptimal; }
  double time_of(int id) const;
};

/// Thrown for problems that violate AllocationProblem invariants.
class AllocationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_problem(const AllocationProblem& p);

/// Minimum energy that keeps the harvesting circuitry alive for one period.
double keep_alive_energy(double off_power, double period);
bool below_keep_alive(double budget, double off_power, double period);

/// Variables t_1..t_N then t_off; one equality row, one budget row.
StandardFormLP build_problem(const AllocationProblem& p);

Allocation optimize_allocation(const AllocationProblem& p, const SolveOptions& options = {});

Allocation envelope_oracle(const AllocationProblem& p);

/// Runs `dp` alone, duty-cycled against off, until the budget is spent.
Allocation static_dp_allocation(const DesignPoint& dp, double period, double budget,
                                double off_power, double alpha);

/// Fills objective, expected accuracy, active fraction and energy from the
/// times. Points are looked up by id in `catalog`.
void finalize_metrics(Allocation& a, const Catalog& catalog, double period, double alpha);

/// Times keyed by DP id in catalog order.
nlohmann::ordered_json to_json(const Allocation& a);

}  // namespace reap
