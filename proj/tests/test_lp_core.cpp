#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lp_oracle.hpp"
#include "reap/lp_core.hpp"

using namespace reap;

namespace {

StandardFormLP make_lp(std::vector<double> c, std::vector<LinearConstraint> rows) {
  return StandardFormLP{std::move(c), std::move(rows)};
}

constexpr auto LE = ConstraintSense::kLessEqual;
constexpr auto EQ = ConstraintSense::kEqual;

// Chvatal's cycling example: Dantzig's rule with lowest-index ratio ties
// returns to the starting basis after six degenerate pivots.
StandardFormLP cycling_lp() {
  return make_lp({10, -57, -9, -24}, {{{0.5, -5.5, -2.5, 9}, LE, 0},
                                      {{0.5, -1.5, -0.5, 1}, LE, 0},
                                      {{1, 0, 0, 0}, LE, 1}});
}

bool satisfies(const StandardFormLP& lp, const std::vector<double>& x) {
  for (double v : x) {
    if (v < -1e-12) return false;
  }
  for (const auto& row : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coeffs[j] * x[j];
    const double tol = 1e-9 * std::max(1.0, std::abs(row.rhs));
    if (row.sense == EQ && std::abs(lhs - row.rhs) > tol) return false;
    if (row.sense == LE && lhs > row.rhs + tol) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("solve_lp") {
  TEST_CASE("single variable bound") {
    const auto sol = solve_lp(make_lp({1}, {{{1}, LE, 1}}));
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[0] == doctest::Approx(1.0));
    CHECK(sol.objective == doctest::Approx(1.0));
  }

  TEST_CASE("two-variable polytope optimum at (4, 0)") {
    // vertices (0,0) (4,0) (0,2) (3,1): objective 0 12 4 11
    const auto sol = solve_lp(make_lp({3, 2}, {{{1, 1}, LE, 4}, {{1, 3}, LE, 6}}));
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[0] == doctest::Approx(4.0));
    CHECK(sol.values[1] == doctest::Approx(0.0));
    CHECK(sol.objective == doctest::Approx(12.0));
  }

  TEST_CASE("equality with a budget row") {
    // max x + 2y, x + y = 1, 3y <= 1 -> y = 1/3, x = 2/3
    const auto sol = solve_lp(make_lp({1, 2}, {{{1, 1}, EQ, 1}, {{0, 3}, LE, 1}}));
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[0] == doctest::Approx(2.0 / 3.0));
    CHECK(sol.values[1] == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("contradictory equality is infeasible") {
    const auto sol = solve_lp(make_lp({1, 1}, {{{0, 0}, EQ, 1}}));
    CHECK(sol.status == LpStatus::kInfeasible);
    CHECK(sol.values.empty());
  }

  TEST_CASE("infeasible LE with negative rhs") {
    // x + y <= -1 with x, y >= 0
    CHECK(solve_lp(make_lp({1, 1}, {{{1, 1}, LE, -1}})).status == LpStatus::kInfeasible);
    // x <= 1 and x = 2
    CHECK(solve_lp(make_lp({1}, {{{1}, LE, 1}, {{1}, EQ, 2}})).status == LpStatus::kInfeasible);
  }

  TEST_CASE("negative rhs LE rows that are feasible") {
    // -x <= -2 means x >= 2; min x -> x = 2
    const auto sol = solve_lp(make_lp({-1}, {{{-1}, LE, -2}, {{1}, LE, 5}}));
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[0] == doctest::Approx(2.0));
  }

  TEST_CASE("unbounded") {
    const auto sol = solve_lp(make_lp({1, 1}, {{{1, -1}, LE, 1}}));
    CHECK(sol.status == LpStatus::kUnbounded);
    CHECK(sol.values.empty());
    CHECK(solve_lp(make_lp({0, 1}, {{{1, 0}, EQ, 1}})).status == LpStatus::kUnbounded);
  }

  TEST_CASE("redundant equality rows") {
    const auto sol = solve_lp(make_lp({1, 2}, {{{1, 1}, EQ, 2}, {{2, 2}, EQ, 4}, {{0, 1}, LE, 1.5}}));
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(3.5));
  }

  TEST_CASE("dimension mismatch is rejected before solving") {
    CHECK_THROWS_AS(solve_lp(make_lp({1, 1}, {{{1}, LE, 1}})), LpDimensionError);
    CHECK_THROWS_AS(solve_lp(make_lp({1}, {})), LpDimensionError);
    CHECK_THROWS_AS(solve_lp(make_lp({1}, {{{1}, LE, NAN}})), LpDimensionError);
  }

  TEST_CASE("iteration limit returns the feasible iterate") {
    const auto lp = make_lp({3, 2}, {{{1, 1}, LE, 4}, {{1, 3}, LE, 6}, {{1, 0}, LE, 3}});
    const auto full = solve_lp(lp);
    REQUIRE(full.status == LpStatus::kOptimal);
    REQUIRE(full.iterations >= 2);
    const auto cut = solve_lp(lp, 1);
    CHECK(cut.status == LpStatus::kIterationLimit);
    REQUIRE(cut.values.size() == 2);
    CHECK(satisfies(lp, cut.values));
    CHECK(cut.objective <= full.objective + 1e-12);
  }

  TEST_CASE("default iteration budget") {
    CHECK(default_max_iterations(cycling_lp()) == 50 * (4 + 3));
  }

  TEST_CASE("degenerate cycling instance terminates") {
    const auto sol = solve_lp(cycling_lp());
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK(sol.values[0] == doctest::Approx(1.0));
    CHECK(sol.values[2] == doctest::Approx(1.0));

    SolveOptions plain;
    plain.anti_cycling = false;
    plain.max_iterations = 500;
    CHECK(solve_lp(cycling_lp(), plain).status == LpStatus::kIterationLimit);
  }

  TEST_CASE("identical input gives identical pivots") {
    SolveOptions opts;
    opts.record_trace = true;
    const auto lp = make_lp({0.94, 0.93, 0.92, 0.9, 0.76, 0},
                            {{{1, 1, 1, 1, 1, 1}, EQ, 3600},
                             {{2.76e-3, 2.3e-3, 1.82e-3, 1.64e-3, 1.2e-3, 5e-5}, LE, 5}});
    const auto a = solve_lp(lp, opts);
    const auto b = solve_lp(lp, opts);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].col == b.trace[i].col);
      CHECK(a.trace[i].row == b.trace[i].row);
    }
    CHECK(a.values == b.values);

    std::ostringstream os;
    write_trace(os, a.trace);
    const std::string text = os.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(a.trace.size()));
  }

  TEST_CASE("agrees with vertex enumeration on random small LPs") {
    std::mt19937_64 rng(20240601);
    int optimal = 0;
    int infeasible = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const auto lp = testing::random_small_lp(rng);
      const auto sol = solve_lp(lp);
      const auto ref = testing::enumerate_vertices(lp);
      CAPTURE(trial);
      if (!ref) {
        CHECK(sol.status == LpStatus::kInfeasible);
        ++infeasible;
        continue;
      }
      REQUIRE(sol.status == LpStatus::kOptimal);
      CHECK(satisfies(lp, sol.values));
      CHECK(std::abs(sol.objective - ref->objective) <= 1e-8 * std::max(1.0, std::abs(ref->objective)));
      ++optimal;
    }
    CHECK(optimal > 100);
    CHECK(infeasible > 5);
  }
}

TEST_SUITE("tableau") {
  TEST_CASE("column counts") {
    const auto one_le = add_slacks(make_lp({1, 1}, {{{1, 2}, LE, 3}}));
    CHECK(one_le.num_cols() == 3);
    CHECK(one_le.count(ColumnKind::kSlack) == 1);
    CHECK(one_le.count(ColumnKind::kArtificial) == 0);

    const auto mixed = add_slacks(make_lp({1, 1}, {{{1, 1}, EQ, 1}, {{1, 2}, LE, 3}}));
    CHECK(mixed.count(ColumnKind::kSlack) == 1);
    CHECK(mixed.count(ColumnKind::kArtificial) == 1);
    CHECK(mixed.num_cols() == 4);
  }

  TEST_CASE("initial basis is feasible and made of unit columns") {
    const auto t = add_slacks(make_lp({1, 1, 1}, {{{1, 1, 1}, EQ, 5}, {{1, 2, 3}, LE, 7}, {{1, -1, 0}, LE, -1}}));
    for (std::size_t i = 0; i < t.num_rows(); ++i) {
      CHECK(t.rhs(i) >= 0.0);
      const std::size_t b = t.basis[i];
      for (std::size_t r = 0; r < t.num_rows(); ++r) CHECK(t.at(r, b) == (r == i ? 1.0 : 0.0));
      CHECK(t.reduced_cost(b) == 0.0);
    }
  }

  TEST_CASE("pivot column rule") {
    Tableau t(1, 3);
    t.reduced_cost(0) = -1;
    t.reduced_cost(1) = -2;
    t.reduced_cost(2) = 0;
    CHECK_FALSE(find_pivot_col(t).has_value());

    t.reduced_cost(0) = 0.5;
    t.reduced_cost(1) = 3.0;
    t.reduced_cost(2) = 1.0;
    CHECK(find_pivot_col(t) == 1u);

    Tableau tie(1, 2);
    tie.reduced_cost(0) = 2.0;
    tie.reduced_cost(1) = 2.0;
    CHECK(find_pivot_col(tie) == 0u);

    Tableau tiny(1, 1);
    tiny.reduced_cost(0) = 1e-13;
    CHECK_FALSE(find_pivot_col(tiny).has_value());
  }

  TEST_CASE("pivot column skips barred columns") {
    Tableau t(1, 2);
    t.reduced_cost(0) = 5.0;
    t.reduced_cost(1) = 1.0;
    t.barred[0] = true;
    CHECK(find_pivot_col(t) == 1u);
    CHECK(find_pivot_col_bland(t) == 1u);
  }

  TEST_CASE("ratio test") {
    Tableau t(2, 1);
    t.at(0, 0) = 2;
    t.at(1, 0) = 1;
    t.rhs(0) = 4;
    t.rhs(1) = 1;
    CHECK(find_pivot_row(t, 0) == 1u);

    t.at(0, 0) = -1;
    t.at(1, 0) = 0;
    CHECK_FALSE(find_pivot_row(t, 0).has_value());

    t.at(0, 0) = 1;
    t.at(1, 0) = 2;
    t.rhs(0) = 2;
    t.rhs(1) = 4;
    CHECK(find_pivot_row(t, 0) == 0u);
  }

  TEST_CASE("pivot on an existing unit column only moves the basis") {
    Tableau t(2, 2);
    t.at(0, 0) = 1;
    t.at(0, 1) = 3;
    t.at(1, 1) = 2;
    t.rhs(0) = 4;
    t.rhs(1) = 5;
    t.reduced_cost(1) = 1.5;
    t.basis = {1, 1};
    const Tableau before = t;
    pivot(t, 0, 0);
    for (std::size_t r = 0; r <= 2; ++r) {
      for (std::size_t c = 0; c <= 2; ++c) CHECK(t.at(r, c) == before.at(r, c));
    }
    CHECK(t.basis[0] == 0u);
  }

  TEST_CASE("two pivots reduce a 2x2 system to the identity") {
    // [2 1 | 5; 1 3 | 10] -> hand Gauss-Jordan gives x = (1, 3)
    Tableau t(2, 2);
    t.at(0, 0) = 2;
    t.at(0, 1) = 1;
    t.rhs(0) = 5;
    t.at(1, 0) = 1;
    t.at(1, 1) = 3;
    t.rhs(1) = 10;
    t.reduced_cost(0) = 1;
    t.reduced_cost(1) = 1;

    pivot(t, 0, 0);
    CHECK(t.at(0, 1) == doctest::Approx(0.5));
    CHECK(t.rhs(0) == doctest::Approx(2.5));
    CHECK(t.at(1, 1) == doctest::Approx(2.5));
    CHECK(t.rhs(1) == doctest::Approx(7.5));
    CHECK(t.reduced_cost(0) == 0.0);

    pivot(t, 1, 1);
    CHECK(t.at(0, 0) == 1.0);
    CHECK(t.at(0, 1) == 0.0);
    CHECK(t.at(1, 0) == doctest::Approx(0.0));
    CHECK(t.at(1, 1) == 1.0);
    CHECK(t.rhs(0) == doctest::Approx(1.0));
    CHECK(t.rhs(1) == doctest::Approx(3.0));
    CHECK(t.reduced_cost(1) == 0.0);
    // objective row: 1*x + 1*y at (1, 3)
    CHECK(t.objective_value() == doctest::Approx(4.0));
  }

  TEST_CASE("numerically zero pivot is rejected") {
    Tableau t(1, 1);
    t.at(0, 0) = 1e-13;
    CHECK_THROWS_AS(pivot(t, 0, 0), NumericalPivotError);
  }
}

TEST_CASE("optimality and feasibility hold along every trace") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lp = testing::random_small_lp(rng);
    Tableau t = add_slacks(lp);
    // drive phase 2 by hand when there are no artificials
    if (t.count(ColumnKind::kArtificial) > 0) continue;
    for (int it = 0; it < 200; ++it) {
      const auto col = find_pivot_col(t);
      if (!col) {
        for (std::size_t j = 0; j < t.num_cols(); ++j) CHECK(t.reduced_cost(j) <= 1e-12);
        break;
      }
      const auto row = find_pivot_row(t, *col);
      if (!row) break;
      pivot(t, *row, *col);
      for (std::size_t i = 0; i < t.num_rows(); ++i) CHECK(t.rhs(i) >= -1e-12);
    }
  }
}
