#pragma once

// Trace-driven and sweep-driven comparison of the optimized allocation
// against every static design point.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reap/allocator.hpp"
#include "reap/catalog.hpp"
#include "reap/harvest.hpp"

namespace reap {

struct PeriodRecord {
  std::size_t index = 0;
  double period_start = 0.0;
  double budget = 0.0;
  Allocation reap;
  std::vector<Allocation> statics;  // catalog order
  // J_reap / J_static; nullopt when the static point scores zero.
  std::vector<std::optional<double>> normalized;
};

struct RatioStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t defined = 0;
  std::size_t undefined = 0;
};

struct Aggregates {
  std::vector<RatioStats> ratios;  // catalog order
  double mean_expected_accuracy = 0.0;
  double mean_active_fraction = 0.0;
  double mean_objective = 0.0;
  std::vector<double> dp_time_totals;  // seconds per DP under the optimized plan
  double off_time_total = 0.0;
  std::size_t infeasible_periods = 0;
};

struct SimulationReport {
  double alpha = 1.0;
  double period_length = 3600.0;
  Catalog catalog;
  std::vector<PeriodRecord> records;
  Aggregates aggregates;
};

/// One record: optimized allocation plus every static baseline. Budgets
/// below the keep-alive floor come back fully off with objective 0.
PeriodRecord evaluate_period(const Catalog& catalog, double alpha, double period_length,
                             double budget);

Aggregates aggregate(const std::vector<PeriodRecord>& records, std::size_t num_dps);

SimulationReport simulate(const BudgetSeries& budgets, const Catalog& catalog, double alpha,
                          double period_length);

struct BudgetRange {
  double start = 0.18;
  double stop = 10.0;
  double step = 0.1;

  /// Points start + k * step for k = 0 .. floor((stop - start) / step).
  std::vector<double> points() const;
};

/// Parses `start:stop:step`.
BudgetRange parse_budget_range(const std::string& text);

struct BudgetSweep {
  double alpha = 1.0;
  Catalog catalog;
  std::vector<PeriodRecord> rows;  // one per budget point
  Aggregates aggregates;
};

BudgetSweep sweep_budget(const Catalog& catalog, double alpha, const BudgetRange& range,
                         double period_length);

struct AlphaSweepRow {
  double alpha = 0.0;
  Aggregates aggregates;
};

struct AlphaSweep {
  Catalog catalog;
  std::vector<AlphaSweepRow> rows;
};

AlphaSweep sweep_alpha(const Catalog& catalog, const BudgetSeries& budgets,
                       const std::vector<double>& alphas, double period_length);

nlohmann::ordered_json to_json(const SimulationReport& report);
nlohmann::ordered_json to_json(const BudgetSweep& sweep);
nlohmann::ordered_json to_json(const AlphaSweep& sweep);

/// One row per period / sweep point. Undefined ratios are empty cells.
void write_csv(std::ostream& out, const SimulationReport& report);
void write_csv(std::ostream& out, const BudgetSweep& sweep);
void write_csv(std::ostream& out, const AlphaSweep& sweep);

/// Human-readable mean normalized ratio per design point.
void write_summary(std::ostream& out, const Catalog& catalog, const Aggregates& aggregates);

}  // namespace reap
