#include "reap/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace reap {

double Allocation::time_of(int id) const {
  for (const auto& t : times) {
    if (t.id == id) return t.seconds;
  }
  return 0.0;
}

void check_problem(const AllocationProblem& p) {
  if (!(std::isfinite(p.period) && p.period > 0.0)) {
    throw AllocationError("period must be finite and > 0");
  }
  if (!(std::isfinite(p.alpha) && p.alpha >= 0.0)) {
    throw AllocationError("alpha must be finite and >= 0");
  }
  if (!std::isfinite(p.budget)) throw AllocationError("budget must be finite");
  const auto violations = validate(p.catalog);
  if (!violations.empty()) throw AllocationError("invalid catalog: " + violations.front().message);
}

double keep_alive_energy(double off_power, double period) { return off_power * period; }

bool below_keep_alive(double budget, double off_power, double period) {
  const double floor = keep_alive_energy(off_power, period);
  return budget < floor - kFeasibilityTolerance * std::max(1.0, floor);
}

StandardFormLP build_problem(const AllocationProblem& p) {
  const auto& dps = p.catalog.design_points;
  const std::size_t n = dps.size() + 1;

  StandardFormLP lp;
  lp.objective.reserve(n);
  for (const auto& dp : dps) lp.objective.push_back(std::pow(dp.accuracy, p.alpha) / p.period);
  lp.objective.push_back(0.0);

  LinearConstraint time_row{std::vector<double>(n, 1.0), ConstraintSense::kEqual, p.period};

  LinearConstraint energy_row{{}, ConstraintSense::kLessEqual, p.budget};
  energy_row.coeffs.reserve(n);
  for (const auto& dp : dps) energy_row.coeffs.push_back(dp.power);
  energy_row.coeffs.push_back(p.catalog.off_power);

  lp.constraints = {std::move(time_row), std::move(energy_row)};
  return lp;
}

namespace {

Allocation all_off(const std::vector<DesignPoint>& dps, double period, LpStatus status) {
  Allocation a;
  a.status = status;
  for (const auto& dp : dps) a.times.push_back({dp.id, 0.0});
  a.off_time = period;
  return a;
}

const DesignPoint* find_dp(const Catalog& catalog, int id) {
  for (const auto& dp : catalog.design_points) {
    if (dp.id == id) return &dp;
  }
  return nullptr;
}

}  // namespace

void finalize_metrics(Allocation& a, const Catalog& catalog, double period, double alpha) {
  double weighted = 0.0;
  double accuracy = 0.0;
  double active = 0.0;
  double energy = catalog.off_power * a.off_time;
  for (const auto& t : a.times) {
    const DesignPoint* dp = find_dp(catalog, t.id);
    if (dp == nullptr) throw AllocationError("allocation names unknown DP id " + std::to_string(t.id));
    weighted += std::pow(dp->accuracy, alpha) * t.seconds;
    accuracy += dp->accuracy * t.seconds;
    active += t.seconds;
    energy += dp->power * t.seconds;
  }
  a.objective = weighted / period;
  a.expected_accuracy = accuracy / period;
  a.active_fraction = active / period;
  a.energy_used = energy;
}

Allocation optimize_allocation(const AllocationProblem& p, const SolveOptions& options) {
  check_problem(p);
  const auto& dps = p.catalog.design_points;
  if (below_keep_alive(p.budget, p.catalog.off_power, p.period)) {
    return all_off(dps, p.period, LpStatus::kInfeasible);
  }

  const LPSolution sol = solve_lp(build_problem(p), options);
  if (sol.values.empty()) {
    Allocation a = all_off(dps, p.period, sol.status);
    a.iterations = sol.iterations;
    return a;
  }

  Allocation a;
  a.status = sol.status;
  a.iterations = sol.iterations;
  for (std::size_t i = 0; i < dps.size(); ++i) a.times.push_back({dps[i].id, sol.values[i]});
  a.off_time = sol.values.back();
  finalize_metrics(a, p.catalog, p.period, p.alpha);
  return a;
}

Allocation envelope_oracle(const AllocationProblem& p) {
  check_problem(p);
  const auto& dps = p.catalog.design_points;
  if (below_keep_alive(p.budget, p.catalog.off_power, p.period)) {
    return all_off(dps, p.period, LpStatus::kInfeasible);
  }

  struct Point {
    double power;
    double value;
    int index;  // -1 is the off state
  };
  std::vector<Point> points{{p.catalog.off_power, 0.0, -1}};
  for (std::size_t i = 0; i < dps.size(); ++i) {
    points.push_back({dps[i].power, std::pow(dps[i].accuracy, p.alpha), static_cast<int>(i)});
  }
  std::stable_sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return a.power < b.power || (a.power == b.power && a.value > b.value);
  });

  // Upper hull, left to right. Collinear middle points are dropped.
  std::vector<Point> hull;
  for (const Point& q : points) {
    if (!hull.empty() && hull.back().power == q.power) continue;
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& b = hull.back();
      const double cross = (b.power - a.power) * (q.value - a.value) - (b.value - a.value) * (q.power - a.power);
      if (cross < 0.0) break;
      hull.pop_back();
    }
    hull.push_back(q);
  }
  // Past the highest value the envelope only costs energy.
  const auto peak = std::max_element(hull.begin(), hull.end(),
                                     [](const Point& a, const Point& b) { return a.value < b.value; });
  hull.erase(peak + 1, hull.end());

  Allocation a = all_off(dps, p.period, LpStatus::kOptimal);
  a.off_time = 0.0;
  auto assign = [&](const Point& pt, double seconds) {
    if (pt.index < 0) {
      a.off_time += seconds;
    } else {
      a.times[pt.index].seconds += seconds;
    }
  };

  const double target = p.budget / p.period;
  if (target >= hull.back().power) {
    assign(hull.back(), p.period);
  } else {
    std::size_t k = 0;
    while (k + 1 < hull.size() && hull[k + 1].power <= target) ++k;
    const Point& lo = hull[k];
    const Point& hi = hull[k + 1];
    const double w = std::clamp((target - lo.power) / (hi.power - lo.power), 0.0, 1.0);
    assign(hi, w * p.period);
    assign(lo, p.period - w * p.period);
  }
  finalize_metrics(a, p.catalog, p.period, p.alpha);
  return a;
}

Allocation static_dp_allocation(const DesignPoint& dp, double period, double budget, double off_power,
                                double alpha) {
  Catalog single{{dp}, off_power};
  if (below_keep_alive(budget, off_power, period)) {
    return all_off(single.design_points, period, LpStatus::kInfeasible);
  }
  const double spare = std::max(budget - keep_alive_energy(off_power, period), 0.0);
  const double t = std::min(period, spare / (dp.power - off_power));

  Allocation a;
  a.times = {{dp.id, t}};
  a.off_time = period - t;
  finalize_metrics(a, single, period, alpha);
  return a;
}

nlohmann::ordered_json to_json(const Allocation& a) {
  nlohmann::ordered_json times = nlohmann::ordered_json::object();
  for (const auto& t : a.times) times[std::to_string(t.id)] = t.seconds;
  nlohmann::ordered_json j;
  j["status"] = to_string(a.status);
  j["times"] = std::move(times);
  j["off_time"] = a.off_time;
  j["objective"] = a.objective;
  j["expected_accuracy"] = a.expected_accuracy;
  j["active_fraction"] = a.active_fraction;
  j["energy_used"] = a.energy_used;
  return j;
}

}  // namespace reap
