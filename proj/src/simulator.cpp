#include "reap/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "text_util.hpp"

namespace reap {

PeriodRecord evaluate_period(const Catalog& catalog, double alpha, double period_length,
                             double budget) {
  PeriodRecord rec;
  rec.budget = budget;
  rec.reap = optimize_allocation({period_length, budget, alpha, catalog});
  for (const auto& dp : catalog.design_points) {
    Allocation s = static_dp_allocation(dp, period_length, budget, catalog.off_power, alpha);
    rec.normalized.push_back(s.objective > 0.0 ? std::optional<double>(rec.reap.objective / s.objective)
                                               : std::nullopt);
    rec.statics.push_back(std::move(s));
  }
  return rec;
}

Aggregates aggregate(const std::vector<PeriodRecord>& records, std::size_t num_dps) {
  Aggregates agg;
  agg.ratios.assign(num_dps, {});
  agg.dp_time_totals.assign(num_dps, 0.0);
  std::vector<double> sums(num_dps, 0.0);
  for (auto& r : agg.ratios) {
    r.min = std::numeric_limits<double>::infinity();
    r.max = -std::numeric_limits<double>::infinity();
  }

  for (const auto& rec : records) {
    agg.mean_expected_accuracy += rec.reap.expected_accuracy;
    agg.mean_active_fraction += rec.reap.active_fraction;
    agg.mean_objective += rec.reap.objective;
    agg.off_time_total += rec.reap.off_time;
    if (rec.reap.status == LpStatus::kInfeasible) ++agg.infeasible_periods;
    for (std::size_t i = 0; i < num_dps; ++i) {
      agg.dp_time_totals[i] += rec.reap.times[i].seconds;
      auto& stats = agg.ratios[i];
      if (!rec.normalized[i]) {
        ++stats.undefined;
        continue;
      }
      const double v = *rec.normalized[i];
      ++stats.defined;
      sums[i] += v;
      stats.min = std::min(stats.min, v);
      stats.max = std::max(stats.max, v);
    }
  }

  if (!records.empty()) {
    const double n = static_cast<double>(records.size());
    agg.mean_expected_accuracy /= n;
    agg.mean_active_fraction /= n;
    agg.mean_objective /= n;
  }
  for (std::size_t i = 0; i < num_dps; ++i) {
    auto& stats = agg.ratios[i];
    if (stats.defined == 0) {
      stats.mean = stats.min = stats.max = std::numeric_limits<double>::quiet_NaN();
    } else {
      stats.mean = sums[i] / static_cast<double>(stats.defined);
      // keep mean inside [min, max] despite rounding in the sum
      stats.mean = std::clamp(stats.mean, stats.min, stats.max);
    }
  }
  return agg;
}

SimulationReport simulate(const BudgetSeries& budgets, const Catalog& catalog, double alpha,
                          double period_length) {
  if (!(period_length > 0.0)) throw std::invalid_argument("period length must be > 0");
  SimulationReport report;
  report.alpha = alpha;
  report.period_length = period_length;
  report.catalog = catalog;
  report.records.reserve(budgets.entries.size());
  for (std::size_t k = 0; k < budgets.entries.size(); ++k) {
    PeriodRecord rec = evaluate_period(catalog, alpha, period_length, budgets.entries[k].budget);
    rec.index = k;
    rec.period_start = budgets.entries[k].period_start;
    report.records.push_back(std::move(rec));
  }
  report.aggregates = aggregate(report.records, catalog.size());
  return report;
}

std::vector<double> BudgetRange::points() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("budget step must be > 0");
  if (!(stop >= start)) throw std::invalid_argument("budget range stop must be >= start");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

BudgetRange parse_budget_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    const auto v = parse_double(trim(item));
    if (!v) throw std::invalid_argument("bad budget range '" + text + "' (expected start:stop:step)");
    parts.push_back(*v);
  }
  if (parts.size() != 3) throw std::invalid_argument("bad budget range '" + text + "' (expected start:stop:step)");
  BudgetRange r{parts[0], parts[1], parts[2]};
  r.points();  // validates
  return r;
}

BudgetSweep sweep_budget(const Catalog& catalog, double alpha, const BudgetRange& range,
                         double period_length) {
  BudgetSweep sweep;
  sweep.alpha = alpha;
  sweep.catalog = catalog;
  const auto budgets = range.points();
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    sweep.rows.push_back(evaluate_period(catalog, alpha, period_length, budgets[k]));
    sweep.rows.back().index = k;
  }
  sweep.aggregates = aggregate(sweep.rows, catalog.size());
  return sweep;
}

AlphaSweep sweep_alpha(const Catalog& catalog, const BudgetSeries& budgets,
                       const std::vector<double>& alphas, double period_length) {
  AlphaSweep sweep;
  sweep.catalog = catalog;
  for (double alpha : alphas) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
    sweep.rows.push_back({alpha, simulate(budgets, catalog, alpha, period_length).aggregates});
  }
  return sweep;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson nullable(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson to_json(const RatioStats& s) {
  ojson j;
  j["mean"] = nullable(s.mean);
  j["min"] = nullable(s.min);
  j["max"] = nullable(s.max);
  j["defined"] = s.defined;
  j["undefined"] = s.undefined;
  return j;
}

ojson design_points_json(const Catalog& catalog) {
  ojson arr = ojson::array();
  for (const auto& dp : catalog.design_points) {
    arr.push_back({{"id", dp.id}, {"label", dp.label}, {"accuracy", dp.accuracy}, {"power", dp.power}});
  }
  return arr;
}

ojson aggregates_json(const Catalog& catalog, const Aggregates& agg) {
  ojson ratios = ojson::object();
  ojson times = ojson::object();
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const std::string id = std::to_string(catalog.design_points[i].id);
    ratios[id] = to_json(agg.ratios[i]);
    times[id] = agg.dp_time_totals[i];
  }
  ojson j;
  j["normalized_ratio"] = std::move(ratios);
  j["mean_objective"] = agg.mean_objective;
  j["mean_expected_accuracy"] = agg.mean_expected_accuracy;
  j["mean_active_fraction"] = agg.mean_active_fraction;
  j["time_totals"] = std::move(times);
  j["off_time_total"] = agg.off_time_total;
  j["infeasible_periods"] = agg.infeasible_periods;
  return j;
}

std::string dp_column(const DesignPoint& dp, const char* suffix) {
  return "dp" + std::to_string(dp.id) + "_" + suffix;
}

std::string cell(const std::optional<double>& v) { return v ? format_shortest(*v) : std::string(); }

std::string cell(double v) { return std::isfinite(v) ? format_shortest(v) : std::string(); }

}  // namespace

nlohmann::ordered_json to_json(const SimulationReport& report) {
  ojson records = ojson::array();
  for (const auto& rec : report.records) {
    ojson statics = ojson::object();
    ojson normalized = ojson::object();
    for (std::size_t i = 0; i < report.catalog.size(); ++i) {
      const std::string id = std::to_string(report.catalog.design_points[i].id);
      statics[id] = to_json(rec.statics[i]);
      normalized[id] = rec.normalized[i] ? ojson(*rec.normalized[i]) : ojson(nullptr);
    }
    ojson r;
    r["index"] = rec.index;
    r["period_start"] = rec.period_start;
    r["budget"] = rec.budget;
    r["reap"] = to_json(rec.reap);
    r["statics"] = std::move(statics);
    r["normalized"] = std::move(normalized);
    records.push_back(std::move(r));
  }
  ojson j;
  j["alpha"] = report.alpha;
  j["period_length"] = report.period_length;
  j["off_power"] = report.catalog.off_power;
  j["design_points"] = design_points_json(report.catalog);
  j["aggregates"] = aggregates_json(report.catalog, report.aggregates);
  j["records"] = std::move(records);
  return j;
}

nlohmann::ordered_json to_json(const BudgetSweep& sweep) {
  ojson rows = ojson::array();
  for (const auto& row : sweep.rows) {
    ojson statics = ojson::object();
    for (std::size_t i = 0; i < sweep.catalog.size(); ++i) {
      statics[std::to_string(sweep.catalog.design_points[i].id)] = to_json(row.statics[i]);
    }
    rows.push_back({{"budget", row.budget}, {"reap", to_json(row.reap)}, {"statics", std::move(statics)}});
  }
  ojson j;
  j["alpha"] = sweep.alpha;
  j["design_points"] = design_points_json(sweep.catalog);
  j["aggregates"] = aggregates_json(sweep.catalog, sweep.aggregates);
  j["rows"] = std::move(rows);
  return j;
}

nlohmann::ordered_json to_json(const AlphaSweep& sweep) {
  ojson rows = ojson::array();
  for (const auto& row : sweep.rows) {
    ojson r;
    r["alpha"] = row.alpha;
    r["aggregates"] = aggregates_json(sweep.catalog, row.aggregates);
    rows.push_back(std::move(r));
  }
  ojson j;
  j["design_points"] = design_points_json(sweep.catalog);
  j["rows"] = std::move(rows);
  return j;
}

void write_csv(std::ostream& out, const SimulationReport& report) {
  const auto& dps = report.catalog.design_points;
  out << "index,period_start,budget,status,reap_objective,reap_expected_accuracy,reap_active_fraction";
  for (const auto& dp : dps) out << ",reap_t_dp" << dp.id;
  out << ",reap_off_time";
  for (const auto& dp : dps) out << ',' << dp_column(dp, "objective");
  for (const auto& dp : dps) out << ",ratio_dp" << dp.id;
  out << '\n';

  for (const auto& rec : report.records) {
    out << rec.index << ',' << format_shortest(rec.period_start) << ',' << format_shortest(rec.budget) << ','
        << to_string(rec.reap.status) << ',' << format_shortest(rec.reap.objective) << ','
        << format_shortest(rec.reap.expected_accuracy) << ',' << format_shortest(rec.reap.active_fraction);
    for (const auto& t : rec.reap.times) out << ',' << format_shortest(t.seconds);
    out << ',' << format_shortest(rec.reap.off_time);
    for (const auto& s : rec.statics) out << ',' << format_shortest(s.objective);
    for (const auto& r : rec.normalized) out << ',' << cell(r);
    out << '\n';
  }
}

void write_csv(std::ostream& out, const BudgetSweep& sweep) {
  const auto& dps = sweep.catalog.design_points;
  out << "budget,reap_objective,reap_expected_accuracy,reap_active_fraction";
  for (const auto& dp : dps) {
    out << ',' << dp_column(dp, "objective") << ',' << dp_column(dp, "expected_accuracy") << ','
        << dp_column(dp, "active_fraction");
  }
  out << '\n';
  for (const auto& row : sweep.rows) {
    out << format_shortest(row.budget) << ',' << format_shortest(row.reap.objective) << ','
        << format_shortest(row.reap.expected_accuracy) << ',' << format_shortest(row.reap.active_fraction);
    for (const auto& s : row.statics) {
      out << ',' << format_shortest(s.objective) << ',' << format_shortest(s.expected_accuracy) << ','
          << format_shortest(s.active_fraction);
    }
    out << '\n';
  }
}

void write_csv(std::ostream& out, const AlphaSweep& sweep) {
  const auto& dps = sweep.catalog.design_points;
  out << "alpha,mean_objective,mean_expected_accuracy,mean_active_fraction";
  for (const auto& dp : dps) {
    out << ',' << dp_column(dp, "ratio_mean") << ',' << dp_column(dp, "ratio_min") << ','
        << dp_column(dp, "ratio_max") << ',' << dp_column(dp, "ratio_undefined");
  }
  out << '\n';
  for (const auto& row : sweep.rows) {
    const auto& agg = row.aggregates;
    out << format_shortest(row.alpha) << ',' << format_shortest(agg.mean_objective) << ','
        << format_shortest(agg.mean_expected_accuracy) << ',' << format_shortest(agg.mean_active_fraction);
    for (const auto& r : agg.ratios) {
      out << ',' << cell(r.mean) << ',' << cell(r.min) << ',' << cell(r.max) << ',' << r.undefined;
    }
    out << '\n';
  }
}

void write_summary(std::ostream& out, const Catalog& catalog, const Aggregates& agg) {
  out << "mean expected accuracy " << format_number(agg.mean_expected_accuracy) << ", mean active fraction "
      << format_number(agg.mean_active_fraction) << ", infeasible periods " << agg.infeasible_periods << '\n';
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& dp = catalog.design_points[i];
    const auto& r = agg.ratios[i];
    out << "  vs " << dp.label << " (id " << dp.id << "): ";
    if (r.defined == 0) {
      out << "undefined";
    } else {
      out << "mean " << format_number(r.mean) << " [" << format_number(r.min) << ", " << format_number(r.max)
          << "]";
    }
    if (r.undefined > 0) out << ", " << r.undefined << " undefined";
    out << '\n';
  }
}

}  // namespace reap
