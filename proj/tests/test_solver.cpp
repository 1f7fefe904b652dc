#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "algp/solver.hpp"

using namespace algp;

namespace {

const double kSqrt2 = std::sqrt(2.0);

double g3(double x) { return std::pow(std::max(x, 0.0), -2.0 / 3.0); }

DirichletProblem diamond_g3_problem() {
  Domain d = diamond_domain();
  return {d, euclidean_integrand(), boundary_power_law(d, 3), 2};
}

GridFunction capped_oracle(const DirichletProblem& p, const GridSpec& g,
                           double cap) {
  return chord_oracle([cap](double x) { return std::min(g3(x), cap); }, {1, 0},
                      p.domain, g, cap);
}

}  // namespace

TEST_CASE("chord_oracle level measures follow the closed form") {
  Domain d = diamond_domain();
  GridSpec g = grid_for_domain(d, 1.0 / 256);
  GridFunction u = chord_oracle(g3, {1, 0}, d, g, 1e6);
  for (double t : {1.5, 2.0, 5.0, 20.0, 50.0}) {
    double measured = region_measure(superlevel_set(u, t));
    double expected = std::pow(t, -3.0);
    CHECK(std::abs(measured - expected) <=
          std::max(0.05 * expected, 3.0 * g.h));
  }
}

TEST_CASE("chord_oracle reproduces linear profiles exactly") {
  Domain sq = unit_square_domain();
  GridSpec g = grid_for_domain(sq, 1.0 / 32);
  GridFunction u = chord_oracle([](double x) { return x; }, {1, 0}, sq, g, 1e6);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.mask.inside[g.index(i, j)])
        CHECK(u.values[g.index(i, j)] == g.cell_center(i, j).x);
}

TEST_CASE("chord_oracle rejects non-monotone profiles") {
  Domain d = diamond_domain();
  GridSpec g = grid_for_domain(d, 1.0 / 32);
  CHECK_THROWS_MATCHES(
      chord_oracle([](double x) { return (x - 1.0) * (x - 1.0); }, {1, 0}, d,
                   g, 1e6),
      Error, Catch::Matchers::Predicate<Error>(
                 [](const Error& e) { return e.code == Errc::non_monotone; }));
}

TEST_CASE("constant data converges to the constant") {
  Domain d = diamond_domain();
  DirichletProblem p{d, euclidean_integrand(), boundary_constant(d, 7.0), 2};
  SolverConfig c;
  c.h = 1.0 / 32;
  Solution s = solve_primal_dual(p, c);
  CHECK(s.converged);
  auto [lo, hi] = value_range(s.u);
  CHECK(lo == Catch::Approx(7.0).margin(1e-6));
  CHECK(hi == Catch::Approx(7.0).margin(1e-6));
  CHECK(s.final_energy == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("step sizes violating the bound are rejected") {
  DirichletProblem p = diamond_g3_problem();
  SolverConfig c;
  c.h = 1.0 / 16;
  c.tau = c.sigma = c.h;  // tau*sigma*8/h^2 = 8 > 1
  CHECK_THROWS_MATCHES(solve_primal_dual(p, c), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code == Errc::step_size_violation;
                       }));
}

TEST_CASE("discrete maximum principle for step data") {
  Domain sq = unit_square_domain();
  DirichletProblem p{sq, euclidean_integrand(), boundary_step_x(sq, 0.5), 2};
  SolverConfig c;
  c.h = 1.0 / 32;
  c.value_cap = 10.0;
  Solution s = solve_primal_dual(p, c);
  auto [lo, hi] = value_range(s.u);
  double tol = 3.0 * c.h;
  CHECK(lo >= -tol);
  CHECK(hi <= 1.0 + tol);
}

TEST_CASE("dual feasibility holds after every solve") {
  Domain d = diamond_domain();
  SolverConfig c;
  c.h = 1.0 / 32;
  c.value_cap = 8.0;
  for (const MetricIntegrand& m :
       {euclidean_integrand(), quarter_x2_weight_integrand(d),
        constant_weight_integrand(2.0)}) {
    DirichletProblem p{d, m, boundary_power_law(d, 3), 2};
    Solution s = solve_primal_dual(p, c);
    CHECK(dual_feasibility_gap(p, s) <= 1e-9);
  }
}

TEST_CASE("energy history is nonincreasing after burn-in") {
  DirichletProblem p = diamond_g3_problem();
  SolverConfig c;
  c.h = 1.0 / 32;
  c.value_cap = 8.0;
  Solution s = solve_primal_dual(p, c);
  for (std::size_t k = 1; k < s.energy_history.size(); ++k) {
    if (s.energy_history[k].first < 100) continue;
    CHECK(s.energy_history[k].second <=
          s.energy_history[k - 1].second + 1e-10);
  }
}

TEST_CASE("primal-dual converges to the chord oracle as h -> 0") {
  DirichletProblem p = diamond_g3_problem();
  const double cap = 8.0;
  std::vector<double> gaps;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    SolverConfig c;
    c.h = h;
    c.value_cap = cap;
    c.max_iterations = 40000;
    c.tolerance = 1e-9;
    Solution s = solve_primal_dual(p, c);
    REQUIRE(s.converged);
    gaps.push_back(relative_l1_gap(capped_oracle(p, s.u.grid, cap), s.u));
  }
  CHECK(gaps.back() <= 0.02);
  for (std::size_t k = 1; k < gaps.size(); ++k)
    CHECK(gaps[k] <= 0.62 * gaps[k - 1]);
}

TEST_CASE("solver output never loses to the oracle on the discrete objective") {
  DirichletProblem p = diamond_g3_problem();
  SolverConfig c;
  c.h = 1.0 / 64;
  c.value_cap = 8.0;
  c.max_iterations = 40000;
  c.tolerance = 1e-9;
  Solution s = solve_primal_dual(p, c);
  GridFunction oracle = capped_oracle(p, s.u.grid, 8.0);
  CHECK(discrete_relaxed_energy(p, c, s.u) <=
        discrete_relaxed_energy(p, c, oracle) + 1e-6);
}

TEST_CASE("solves with caps M and 2M agree below M/2") {
  DirichletProblem p = diamond_g3_problem();
  const double M = 4.0;
  SolverConfig c;
  c.h = 1.0 / 64;
  c.max_iterations = 40000;
  c.tolerance = 1e-9;
  c.value_cap = M;
  Solution sm = solve_primal_dual(p, c);
  c.value_cap = 2.0 * M;
  Solution s2m = solve_primal_dual(p, c);
  double gap = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < sm.u.values.size(); ++k) {
    if (!sm.u.mask.inside[k]) continue;
    if (sm.u.values[k] >= M / 2 || s2m.u.values[k] >= M / 2) continue;
    gap += std::abs(sm.u.values[k] - s2m.u.values[k]);
    ref += std::abs(sm.u.values[k]);
  }
  CHECK(gap <= 0.02 * ref);
}

TEST_CASE("multilevel warm start matches the direct solve") {
  DirichletProblem p = diamond_g3_problem();
  SolverConfig c;
  c.h = 1.0 / 64;
  c.value_cap = 8.0;
  c.max_iterations = 40000;
  c.tolerance = 1e-9;
  Solution direct = solve_primal_dual(p, c);
  Solution ml = solve_multilevel(p, c, 2);
  CHECK(relative_l1_gap(direct.u, ml.u) <= 0.005);
  GridFunction oracle = capped_oracle(p, ml.u.grid, 8.0);
  CHECK(relative_l1_gap(oracle, ml.u) <= 0.02);
}

TEST_CASE("relaxed energy of candidate functions") {
  Domain d = diamond_domain();
  DirichletProblem pone{d, euclidean_integrand(), boundary_constant(d, 1.0), 2};
  GridSpec g = grid_for_domain(d, 1.0 / 64);
  GridFunction zero = make_grid_function(d, g, [](Vec2) { return 0.0; });
  // pure boundary penalty: integral of 1 over the boundary
  CHECK(energy(zero, pone) == Catch::Approx(4.0 * kSqrt2).epsilon(0.02));

  GridFunction one = make_grid_function(d, g, [](Vec2) { return 1.0; });
  CHECK(energy(one, pone) == Catch::Approx(0.0).margin(1e-9));

  // the oracle attains its own trace up to one-cell interpolation
  DirichletProblem pg = diamond_g3_problem();
  SolverConfig c;
  c.h = 1.0 / 64;
  c.value_cap = 8.0;
  GridFunction oracle = capped_oracle(pg, g, 8.0);
  DirichletProblem pg_cap{pg.domain, pg.integrand, capped(pg.boundary, 8.0), 2};
  double tv = phi_total_variation(oracle, euclidean_integrand());
  double e = energy(oracle, pg_cap);
  CHECK(e - tv >= 0.0);
  CHECK(e - tv <= 3.0 * c.h * boundary_lp_norm(capped(pg.boundary, 8.0), 1.0));
}

TEST_CASE("step data solution is the indicator of a chord slice") {
  Domain d = diamond_domain();
  DirichletProblem p{d, euclidean_integrand(), boundary_step_x(d, 1.0), 2};
  SolverConfig c;
  c.h = 1.0 / 64;
  c.value_cap = 10.0;
  c.max_iterations = 40000;
  c.tolerance = 1e-9;
  Solution s = solve_primal_dual(p, c);
  GridFunction oracle = chord_oracle(
      [](double x) { return x >= 1.0 ? 1.0 : 0.0; }, {1, 0}, d, s.u.grid, 10.0);
  double gap = 0.0;
  for (std::size_t k = 0; k < s.u.values.size(); ++k)
    if (s.u.mask.inside[k]) gap += std::abs(s.u.values[k] - oracle.values[k]);
  // absolute L1 distance; the diffuse interface spans O(h) cells of the chord
  CHECK(gap * c.h * c.h <= 0.05);
}
