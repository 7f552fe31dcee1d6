#include "doctest.h"

#include "roughldp/kernels.hpp"
#include "roughldp/rates.hpp"

#include <cmath>
#include <random>

using namespace roughldp;

namespace {

VolFunction constant_vol(double c) {
  return VolFunction::custom(ScalarFn::constant(c), ScalarFn::constant(c), 1.0, std::max(c, 1.0));
}

VariationalProblem schilder(std::size_t n) {
  VariationalProblem p;
  p.id = "schilder";
  p.kernel = KernelSpec::identity();
  p.vol = constant_vol(1.0);
  p.rho = 0.0;
  p.include_drift = false;
  p.level = 1.0;
  p.sense = ConstraintSense::AtLeast;
  p.grid = TimeGrid::uniform(n);
  return p;
}

VariationalProblem linear_g0(std::size_t n, double level, double rho = 0.0, double H = 0.5) {
  VariationalProblem p;
  p.id = "linear_g0";
  p.kernel = KernelSpec::small_time_limit(H, 1.0);
  p.vol = VolFunction::linear();
  p.rho = rho;
  p.level = level;
  p.sense = ConstraintSense::Equal;
  p.grid = TimeGrid::uniform(n);
  return p;
}

ModelParams model(double H, double rho) {
  ModelParams m;
  m.hurst = HurstParams::from(H);
  m.rho = rho;
  m.beta = -1.0;
  m.xi = 1.0;
  return m;
}

void check_result_invariants(const VariationalProblem& problem, const RateResult& r,
                             const SolverOptions& opts = {}) {
  REQUIRE(r.converged);
  CHECK(std::abs(r.value - l2_energy(r.controls.f, r.controls.g, problem.grid)) <= 1e-10);
  const double x = r.x_path.at(problem.terminal());
  switch (problem.sense) {
    case ConstraintSense::Equal: CHECK(std::abs(x - r.level_used) <= opts.feasibility_tol); break;
    case ConstraintSense::AtLeast: CHECK(x >= problem.level - opts.feasibility_tol); break;
    case ConstraintSense::AtMost: CHECK(x <= problem.level + opts.feasibility_tol); break;
  }
  CHECK(r.kkt_residual <= opts.kkt_tol);
  CHECK(r.n_grid == problem.grid.size());
}

}  // namespace

TEST_CASE("path_from_controls") {
  SUBCASE("zero controls") {
    VariationalProblem p = linear_g0(8, 1.0);
    const ControlVector zero{std::vector<double>(8, 0.0), std::vector<double>(8, 0.0)};
    const PathPair pp = path_from_controls(p, zero);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(pp.x[i] == 0.0);
      CHECK(pp.y[i] == 0.0);
    }
  }
  SUBCASE("unit vol, g = 1") {
    VariationalProblem p = schilder(10);
    const ControlVector c{std::vector<double>(10, 0.0), std::vector<double>(10, 1.0)};
    const PathPair pp = path_from_controls(p, c);
    for (std::size_t i = 0; i < 10; ++i) CHECK(pp.x[i] == doctest::Approx(p.grid.node(i)).epsilon(1e-14));
  }
  SUBCASE("linear vol, identity kernel, f = 1, rho = 1") {
    VariationalProblem p = schilder(10);
    p.vol = VolFunction::linear();
    p.rho = 1.0;
    const ControlVector c{std::vector<double>(10, 1.0), std::vector<double>(10, 0.0)};
    const PathPair pp = path_from_controls(p, c);
    for (std::size_t i = 0; i < 10; ++i) {
      const double t = p.grid.node(i);
      CHECK(pp.y[i] == doctest::Approx(t).epsilon(1e-14));
      CHECK(pp.x[i] == doctest::Approx(0.5 * t * t).epsilon(1e-13));
    }
  }
  SUBCASE("exponential start and drift") {
    VariationalProblem p = schilder(10);
    p.include_drift = true;
    p.vol = VolFunction::linear();
    p.start = StartSpec::fixed(0.5, StartShape::Exponential, -1.0);
    const ControlVector zero{std::vector<double>(10, 0.0), std::vector<double>(10, 0.0)};
    const PathPair pp = path_from_controls(p, zero);
    CHECK(pp.y[9] == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(pp.x[9] < 0.0);
    const PathPair other = path_from_controls(p, zero, 0.0);
    CHECK(other.y[9] == 0.0);
  }
  SUBCASE("dimension mismatch") {
    VariationalProblem p = schilder(10);
    const ControlVector bad{std::vector<double>(9, 0.0), std::vector<double>(10, 0.0)};
    CHECK_THROWS_AS((void)path_from_controls(p, bad), std::invalid_argument);
  }
}

TEST_CASE("problem validation") {
  VariationalProblem p = schilder(8);
  CHECK_THROWS_AS((void)StartSpec::interval(0.3, 0.1), std::invalid_argument);
  p.start.lo = 0.3;
  p.start.hi = 0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.start = StartSpec::fixed(0.0);
  p.rho = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.rho = 0.0;
  p.terminal_node = 8;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.terminal_node = 3;
  CHECK(p.terminal() == 3);
  CHECK(StartSpec::fixed(0.2).is_fixed());
  CHECK(StartSpec::fixed(1.0, StartShape::Exponential, -2.0).weight(0.5) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("Schilder problem") {
  const VariationalProblem p = schilder(64);
  const RateResult r = solve(p);
  CHECK(r.status == RateStatus::Converged);
  CHECK(std::abs(r.value - 0.5) <= 1e-6);
  for (double g : r.controls.g) CHECK(g == doctest::Approx(1.0).epsilon(1e-5));
  check_result_invariants(p, r);
  CHECK(std::abs(brute_force_rate(p, 4) - 0.5) <= 1e-4);
}

TEST_CASE("infeasible problem") {
  VariationalProblem p = schilder(16);
  p.vol = constant_vol(0.0);
  const RateResult r = solve(p);
  CHECK(r.status == RateStatus::Infeasible);
  CHECK(r.value == std::numeric_limits<double>::infinity());
  CHECK_FALSE(r.converged);
}

TEST_CASE("drift-included unit vol tails rate is 9/8") {
  ModelParams m = model(0.5, 0.0);
  m.vol = constant_vol(1.0);
  RateSetup setup;
  setup.grid_n = 32;
  const RateResult r = tail_rate(m, 1.0, 1.0, setup);
  CHECK(r.value == doctest::Approx(9.0 / 8.0).epsilon(1e-6));
  for (double g : r.controls.g) CHECK(g == doctest::Approx(1.5).epsilon(1e-5));
  VariationalProblem p = tail_problem(m, 1.0, setup);
  CHECK(p.include_drift);
  CHECK(std::abs(brute_force_rate(p, 4) - 9.0 / 8.0) <= 1e-3);
  check_result_invariants(p, r);
}

TEST_CASE("solve agrees with the brute-force oracle") {
  SUBCASE("linear vol, G_zero, H = 1/2, equality") {
    const VariationalProblem p = linear_g0(6, 1.0);
    const RateResult r = solve(p);
    check_result_invariants(p, r);
    CHECK(std::abs(r.value - brute_force_rate(p, 6)) <= 1e-3);
  }
  SUBCASE("linear vol, tails, H = 1/2") {
    RateSetup setup;
    setup.grid_n = 6;
    const ModelParams m = model(0.5, -0.4);
    const VariationalProblem p = tail_problem(m, 1.0, setup);
    const RateResult r = solve(p);
    check_result_invariants(p, r);
    CHECK(std::abs(r.value - brute_force_rate(p, 6)) <= 1e-3);
  }
  SUBCASE("affine vol, F kernel, H = 0.3") {
    RateSetup setup;
    setup.grid_n = 6;
    ModelParams m = model(0.3, 0.3);
    m.vol = VolFunction::affine_abs(0.2, 1.0);
    m.vol.sigma_tilde = ScalarFn::affine_abs(0.2, 1.0);
    const VariationalProblem p = tail_problem(m, 1.0, setup);
    const RateResult r = solve(p);
    check_result_invariants(p, r);
    CHECK(std::abs(r.value - brute_force_rate(p, 6)) <= 1e-3);
  }
}

TEST_CASE("homogeneity and symmetry for linear vol") {
  for (double H : {0.3, 0.5, 0.7}) {
    CAPTURE(H);
    const RateResult one = solve(linear_g0(16, 1.0, -0.3, H));
    const RateResult two = solve(linear_g0(16, 2.0, -0.3, H));
    const RateResult half = solve(linear_g0(16, 0.5, -0.3, H));
    CHECK(two.value / one.value == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(half.value / one.value == doctest::Approx(0.5).epsilon(1e-5));
    const RateResult plus = solve(linear_g0(16, 0.7, 0.0, H));
    const RateResult minus = solve(linear_g0(16, -0.7, 0.0, H));
    CHECK(std::abs(plus.value - minus.value) <= 1e-6);
  }
  // The brute-force oracle sees the same scaling.
  const double b1 = brute_force_rate(linear_g0(4, 1.0), 4);
  const double b2 = brute_force_rate(linear_g0(4, 2.0), 4);
  CHECK(b2 / b1 == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("level monotonicity") {
  RateSetup setup;
  setup.grid_n = 16;
  const ModelParams m = model(0.3, -0.5);
  double previous = 0.0;
  for (double y : {1.0, 2.0, 3.0}) {
    const RateResult r = tail_rate(m, y, 1.0, setup);
    CHECK(r.converged);
    CHECK(r.value >= previous);
    previous = r.value;
  }
  previous = 0.0;
  for (double k : {0.25, 0.5, 1.0}) {
    const RateResult r = smalltime_rate(m, -k, 0.2, setup);
    CHECK(r.value >= previous);
    previous = r.value;
  }
  const RateResult zero = smalltime_rate(m, 0.0, 0.2, setup);
  CHECK(zero.value == 0.0);
  CHECK(zero.converged);
}

TEST_CASE("smalltime sense follows the sign of k") {
  const ModelParams m = model(0.3, -0.4);
  CHECK(smalltime_problem(m, 0.5).sense == ConstraintSense::AtLeast);
  CHECK(smalltime_problem(m, -0.5).sense == ConstraintSense::AtMost);
  CHECK_FALSE(smalltime_problem(m, 0.5).include_drift);
  CHECK(smalltime_problem(m, 0.5).kernel.kind == KernelKind::SmallTimeLimit);
  CHECK(tail_problem(m, 1.0).kernel.kind == KernelKind::FractionalOU);
}

TEST_CASE("penalized gradient matches central differences") {
  ModelParams m = model(0.3, -0.6);
  m.vol = VolFunction::affine_abs(0.3, 0.8);
  m.vol.sigma_tilde = ScalarFn::affine_abs(0.3, 0.8);
  RateSetup setup;
  setup.grid_n = 12;
  const VariationalProblem p = tail_problem(m, 1.0, setup);
  const RateModel rm(p);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(2 * rm.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    Eigen::VectorXd grad;
    (void)rm.penalized(v, 0.0, 1.0, 0.7, 10.0, &grad);
    Eigen::VectorXd fd(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      Eigen::VectorXd up = v;
      Eigen::VectorXd dn = v;
      up(i) += h;
      dn(i) -= h;
      fd(i) = (rm.penalized(up, 0.0, 1.0, 0.7, 10.0) - rm.penalized(dn, 0.0, 1.0, 0.7, 10.0)) / (2.0 * h);
    }
    CHECK((grad - fd).norm() / grad.norm() <= 1e-6);
  }
}

TEST_CASE("terminal gradient with respect to the start") {
  ModelParams m = model(0.5, -0.3);
  const VariationalProblem p = random_start_problem(m, 0.5, 0.0, 0.4, RateSetup{8, true, {}});
  const RateModel rm(p);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(16, 0.3);
  double gu = 0.0;
  (void)rm.terminal(v, 0.2, nullptr, &gu);
  const double h = 1e-6;
  const double fd = (rm.terminal(v, 0.2 + h) - rm.terminal(v, 0.2 - h)) / (2.0 * h);
  CHECK(gu == doctest::Approx(fd).epsilon(1e-6));
  const ControlVector c = rm.from_scaled(v);
  CHECK((rm.to_scaled(c) - v).norm() <= 1e-14);
}

TEST_CASE("grid refinement") {
  const ModelParams m = model(0.3, -0.5);
  std::vector<double> values;
  for (std::size_t n : {32, 64, 128}) {
    RateSetup setup;
    setup.grid_n = n;
    const RateResult r = smalltime_rate(m, 0.5, 0.2, setup);
    CHECK(r.converged);
    values.push_back(r.value);
  }
  CHECK(std::abs(values[2] - values[1]) < std::abs(values[1] - values[0]));
}

TEST_CASE("random start") {
  const ModelParams m = model(0.5, -0.3);
  RateSetup setup;
  setup.grid_n = 16;
  CHECK_THROWS_AS((void)random_start_problem(model(0.3, 0.0), 0.5, 0.0, 0.1, setup), std::invalid_argument);

  const RateResult degenerate = rate_with_random_start(m, 0.5, 0.1, 0.1, setup);
  VariationalProblem fixed = random_start_problem(m, 0.5, 0.1, 0.1, setup);
  const RateResult direct = solve(fixed);
  CHECK(degenerate.value == doctest::Approx(direct.value).epsilon(1e-12));
  CHECK(degenerate.start_used == 0.1);

  const RateResult wide = rate_with_random_start(m, 0.5, 0.0, 0.2, setup);
  CHECK(wide.start_used >= 0.0);
  CHECK(wide.start_used <= 0.2);
  for (double u : {0.0, 0.05, 0.1, 0.15, 0.2}) {
    const RateResult at_u = rate_with_random_start(m, 0.5, u, u, setup);
    CHECK(wide.value <= at_u.value + 1e-8);
  }
  const RateResult narrow = rate_with_random_start(m, 0.5, 0.0, 0.1, setup);
  CHECK(wide.value <= narrow.value + 1e-8);
}

TEST_CASE("solver is deterministic") {
  const VariationalProblem p = linear_g0(12, 1.0, -0.4, 0.3);
  const RateResult a = solve(p);
  const RateResult b = solve(p);
  CHECK(a.value == b.value);
  CHECK(a.controls.f == b.controls.f);
  CHECK(a.controls.g == b.controls.g);
}
