#pragma once

// Brute-force LP reference: solve every n x n system drawn from the
// constraint hyperplanes and the x_j = 0 bounds, keep the feasible
// solutions, take the best objective. Only valid for bounded problems.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "reap/lp_core.hpp"

namespace reap::testing {

struct VertexOptimum {
  double objective = 0.0;
  std::vector<double> x;
};

inline bool vertex_feasible(const StandardFormLP& lp, const Eigen::VectorXd& x, double tol) {
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] < -tol) return false;
  }
  for (const auto& row : lp.constraints) {
    double lhs = 0.0;
    double scale = std::abs(row.rhs);
    for (std::size_t j = 0; j < row.coeffs.size(); ++j) {
      lhs += row.coeffs[j] * x[static_cast<Eigen::Index>(j)];
      scale = std::max(scale, std::abs(row.coeffs[j] * x[static_cast<Eigen::Index>(j)]));
    }
    const double t = tol * std::max(1.0, scale);
    if (row.sense == ConstraintSense::kEqual && std::abs(lhs - row.rhs) > t) return false;
    if (row.sense == ConstraintSense::kLessEqual && lhs - row.rhs > t) return false;
  }
  return true;
}

/// nullopt when no feasible vertex exists.
inline std::optional<VertexOptimum> enumerate_vertices(const StandardFormLP& lp, double tol = 1e-9) {
  const int n = static_cast<int>(lp.num_vars());
  // hyperplanes: constraint rows first, then bounds x_j = 0
  struct Plane {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Plane> planes;
  for (const auto& row : lp.constraints) {
    planes.push_back({Eigen::Map<const Eigen::VectorXd>(row.coeffs.data(), n), row.rhs});
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    planes.push_back({e, 0.0});
  }

  std::optional<VertexOptimum> best;
  if (static_cast<int>(planes.size()) < n) return best;
  std::vector<bool> pick(planes.size(), false);
  std::fill(pick.begin(), pick.begin() + n, true);
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(lp.objective.data(), n);
  do {
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    int r = 0;
    for (std::size_t k = 0; k < planes.size(); ++k) {
      if (!pick[k]) continue;
      A.row(r) = planes[k].a.transpose();
      b[r++] = planes[k].b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() < n) continue;
    const Eigen::VectorXd x = lu.solve(b);
    if (!vertex_feasible(lp, x, tol)) continue;
    const double value = c.dot(x);
    if (!best || value > best->objective) best = VertexOptimum{value, std::vector<double>(x.data(), x.data() + n)};
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

/// Random bounded LP with 1..4 variables and 1..4 constraints. The first row
/// is a positive LE row with positive rhs, which bounds the region.
inline StandardFormLP random_small_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> small_int(-5, 5);
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool integral = unit(rng) < 0.5;
  auto draw = [&] { return integral ? static_cast<double>(small_int(rng)) : real(rng); };

  StandardFormLP lp;
  const int n = dim(rng);
  const int m = dim(rng);
  for (int j = 0; j < n; ++j) lp.objective.push_back(draw());

  LinearConstraint bound;
  for (int j = 0; j < n; ++j) bound.coeffs.push_back(integral ? 1.0 + std::abs(small_int(rng)) % 3 : 0.5 + 4.5 * unit(rng));
  bound.rhs = integral ? 1.0 + std::abs(small_int(rng)) : 1.0 + 9.0 * unit(rng);
  lp.constraints.push_back(bound);

  for (int k = 1; k < m; ++k) {
    LinearConstraint row;
    for (int j = 0; j < n; ++j) row.coeffs.push_back(draw());
    row.sense = unit(rng) < 0.25 ? ConstraintSense::kEqual : ConstraintSense::kLessEqual;
    row.rhs = integral ? static_cast<double>(small_int(rng)) + 2.0 : -2.0 + 10.0 * unit(rng);
    lp.constraints.push_back(row);
  }
  return lp;
}

}  // namespace reap::testing
