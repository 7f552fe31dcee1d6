#include "doctest.h"

#include "roughldp/kernels.hpp"
#include "roughldp/model.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace roughldp;

namespace {

struct Stats {
  double mean = 0.0;
  double var = 0.0;
  double skew = 0.0;
};

Stats stats(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  Stats s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : v) {
    const double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  s.var = m2 / (n - 1.0);
  s.skew = (m3 / n) / std::pow(m2 / n, 1.5);
  return s;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  return {m.col(c).data(), m.col(c).data() + m.rows()};
}

ModelParams deterministic_params() {
  ModelParams p;
  p.lambda = 0.0;
  p.beta = -1.0;
  p.xi = 0.0;
  p.rho = 0.0;
  p.hurst = HurstParams::from(0.5);
  p.vol = VolFunction::linear(1.0);
  return p;
}

// Mean and variance of X^eps_1 when Y^eps is deterministic: the left-point
// sum over cells of -1/2 s^2 dt and eps^b s dB with s = eps^b y0 e^{beta t}.
std::pair<double, double> deterministic_moments(double eps, double b, double y0, double beta,
                                                const TimeGrid& g) {
  const double eb = std::pow(eps, b);
  double mean = 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double s = eb * y0 * std::exp(beta * g.cell_start(k));
    mean -= 0.5 * s * s * g.weight(k);
    var += eb * eb * s * s * g.weight(k);
  }
  return {mean, var};
}

}  // namespace

TEST_CASE("model parameter invariants") {
  ModelParams p;
  for (double rho : {-0.99, -0.3, 0.0, 0.7}) {
    p.rho = rho;
    CHECK(std::abs(p.rho_bar() * p.rho_bar() + rho * rho - 1.0) <= 1e-15);
  }
  p.rho = 0.0;
  p.beta = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.beta = -1.0;
  p.lambda = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.lambda = 0.0;
  p.rho = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("scalar functions") {
  const ScalarFn lin = ScalarFn::linear();
  CHECK(lin(-2.5) == -2.5);
  CHECK(lin.derivative(3.0) == 1.0);
  const ScalarFn aff = ScalarFn::affine_abs(0.2, 1.5);
  CHECK(aff(-2.0) == doctest::Approx(3.2));
  CHECK(aff.derivative(-1.0) == -1.5);
  CHECK(aff.derivative(0.0) == 1.5);
  const ScalarFn tab = ScalarFn::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 3.0});
  CHECK(tab(0.5) == doctest::Approx(1.0));
  CHECK(tab(3.0) == doctest::Approx(4.0));
  CHECK(tab(-1.0) == doctest::Approx(-2.0));
  CHECK_THROWS_AS((void)ScalarFn::tabulated({1.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK(VolFunction::linear().satisfies_growth({-10.0, 0.0, 10.0}));
  const VolFunction quad = VolFunction::custom(ScalarFn::tabulated({0.0, 10.0}, {0.0, 100.0}),
                                               ScalarFn::linear(), 0.5, 1.0);
  CHECK_FALSE(quad.satisfies_growth({10.0}));
}

TEST_CASE("sample_initial") {
  const auto point = sample_initial(InitialLaw::point(0.2), 3, 1);
  CHECK(point == std::vector<double>{0.2, 0.2, 0.2});

  const auto uni = sample_initial(InitialLaw::uniform(0.1, 0.3), 10000, 2);
  CHECK(*std::min_element(uni.begin(), uni.end()) >= 0.1);
  CHECK(*std::max_element(uni.begin(), uni.end()) <= 0.3);
  CHECK(sample_initial(InitialLaw::uniform(0.1, 0.3), 100, 2) ==
        std::vector<double>(uni.begin(), uni.begin() + 100));

  const auto tg = sample_initial(InitialLaw::trunc_gaussian(1.0, 4.0, 1.5), 10000, 3);
  for (double v : tg) CHECK((v >= -2.0 && v <= 4.0));

  ModelParams p;
  p.lambda = 0.0;
  p.beta = -1.0;
  p.xi = 1.0;
  const std::size_t n = 100000;
  const Stats s = stats(sample_initial(InitialLaw::forward_stein_stein(0.2, 1.0), n, 4, &p));
  const double mean = 0.2 * std::exp(-1.0);
  const double var = (1.0 - std::exp(-2.0)) / 2.0;
  CHECK(std::abs(s.mean - mean) <= 3.0 * std::sqrt(var / n));
  CHECK(std::abs(s.var - var) <= 3.0 * var * std::sqrt(2.0 / n));
  const InitialLaw resolved = InitialLaw::forward_stein_stein(0.2, 1.0).resolved(p);
  CHECK(resolved.kind == InitialLaw::Kind::Gaussian);
  CHECK(resolved.a == doctest::Approx(mean).epsilon(1e-14));
  CHECK(resolved.b == doctest::Approx(var).epsilon(1e-14));

  CHECK_THROWS_AS((void)sample_initial(InitialLaw::forward_stein_stein(0.2, 1.0), 3, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)sample_initial(InitialLaw::gaussian(0.0, -1.0), 3, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)sample_initial(InitialLaw::uniform(0.3, 0.1), 3, 1), std::invalid_argument);
  CHECK(InitialLaw::uniform(0.0, 1.0).bounded());
  CHECK(InitialLaw::trunc_gaussian(0.0, 1.0, 2.0).bounded());
  CHECK_FALSE(InitialLaw::gaussian(0.0, 1.0).bounded());
}

TEST_CASE("rescaling schemes") {
  CHECK(RescalingScheme::tails(1.0).speed(0.5, 0.3) == doctest::Approx(0.25));
  CHECK(RescalingScheme::small_time(0.2).speed(0.5, 0.3) == doctest::Approx(std::pow(0.5, 1.6)));
  CHECK(RescalingScheme::diffusive().speed(0.5, 0.5) == doctest::Approx(0.25));
  CHECK(RescalingScheme::tails(0.5).violation(0.3).empty());
  CHECK_FALSE(RescalingScheme::tails(0.3).violation(0.3).empty());
  CHECK(RescalingScheme::small_time(0.2).violation(0.3).empty());
  CHECK_FALSE(RescalingScheme::small_time(-0.2).violation(0.3).empty());
}

TEST_CASE("scaling assumption audit") {
  const std::vector<double> lattice{-5.0, -1.0, 0.0, 0.5, 3.0};
  const ScalingReport lin = check_scaling_assumption(VolFunction::linear(0.7), {0.7, 0.1, 0.01}, lattice);
  CHECK(lin.pass);
  for (double d : lin.deviation) CHECK(d == 0.0);

  const VolFunction aff = VolFunction::affine_abs(0.3, 1.2, 0.5);
  const ScalingReport a = check_scaling_assumption(aff, {0.1, 0.01}, lattice);
  REQUIRE(a.deviation.size() == 2);
  CHECK(a.deviation[0] == doctest::Approx(std::sqrt(0.1) * 0.3).epsilon(1e-12));
  CHECK(a.deviation[1] == doctest::Approx(0.1 * 0.3).epsilon(1e-12));
  CHECK(a.deviation[1] < a.deviation[0]);

  const VolFunction wrong = VolFunction::custom(ScalarFn::linear(), ScalarFn::constant(0.0), 0.5, 1.0);
  const ScalingReport w = check_scaling_assumption(wrong, {0.1, 0.01}, lattice);
  CHECK_FALSE(w.pass);
  for (double d : w.deviation) CHECK(d == doctest::Approx(5.0));
}

TEST_CASE("theta assumption audit") {
  const RescalingScheme tails = RescalingScheme::tails(1.0);
  const ThetaReport u = check_theta_assumption(InitialLaw::uniform(0.0, 0.3), tails, {0.5});
  CHECK(u.value[0] == -std::numeric_limits<double>::infinity());
  CHECK(u.verdict == ThetaVerdict::DivergesToMinusInfinity);

  const ThetaReport pt = check_theta_assumption(InitialLaw::point(0.2), RescalingScheme::small_time(0.2), {0.5, 0.1}, 0.3);
  for (double v : pt.value) CHECK(v == -std::numeric_limits<double>::infinity());
  CHECK(pt.verdict == ThetaVerdict::DivergesToMinusInfinity);

  const ThetaReport g = check_theta_assumption(InitialLaw::gaussian(0.0, 1.0), tails, {0.1, 0.05, 0.01});
  CHECK(g.verdict == ThetaVerdict::Stalls);
  for (double v : g.value) CHECK(std::isfinite(v));
  CHECK(std::abs(g.value.back() + 0.5) < 0.01);
  CHECK(std::abs(g.value.back() + 0.5) < std::abs(g.value.front() + 0.5));

  CHECK(log_normal_tail(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(log_normal_tail(40.0) == doctest::Approx(-800.0 - std::log(40.0 * std::sqrt(2.0 * M_PI))).epsilon(1e-6));
}

TEST_CASE("estimates") {
  const MCEstimate e = make_estimate(25, 100, 7, "x");
  CHECK(e.p_hat == 0.25);
  CHECK(e.std_err == doctest::Approx(std::sqrt(0.25 * 0.75 / 100.0)));
  const std::vector<double> v{-1.0, 0.0, 0.5, 2.0};
  CHECK(tail_probability(v, -1e9, 1, "low").p_hat == 1.0);
  CHECK(tail_probability(v, 1e9, 1, "high").p_hat == 0.0);
  CHECK(tail_probability(v, 0.0, 1, "mid").hits == 3);
}

TEST_CASE("simulate with deterministic volatility") {
  const ModelParams p = deterministic_params();
  const TimeGrid g = TimeGrid::uniform(32);
  const double eps = 0.5;
  const double y0 = 1.0;
  const std::size_t n = 100000;
  const SimulationBatch batch = simulate(p, InitialLaw::point(y0), RescalingScheme::tails(1.0), eps, g, n, 11);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double y = eps * y0 * std::exp(-g.node(k));
    CHECK((batch.y.col(static_cast<Eigen::Index>(k)).array() - y).abs().maxCoeff() <= 1e-15);
  }
  const auto [mean, var] = deterministic_moments(eps, 1.0, y0, -1.0, g);
  const std::vector<double> x1 = column(batch.x, 31);
  const Stats s = stats(x1);
  CHECK(std::abs(s.mean - mean) <= 3.0 * std::sqrt(var / n));
  CHECK(std::abs(s.var - var) <= 3.0 * var * std::sqrt(2.0 / n));

  const double level = mean + 1.5 * std::sqrt(var);
  const MCEstimate est = tail_probability(batch, level, 1.0);
  const double exact = 1.0 - boost::math::cdf(boost::math::normal(), 1.5);
  CHECK(std::abs(est.p_hat - exact) <= 3.0 * est.std_err);

  CHECK(tail_probability(batch, -1e9, 1.0).p_hat == 1.0);
  CHECK(tail_probability(batch, 1e9, 1.0).p_hat == 0.0);
  double previous = 1.0;
  for (double l = -0.3; l <= 0.3; l += 0.02) {
    const double q = tail_probability(batch, l, 1.0).p_hat;
    CHECK(q <= previous);
    previous = q;
  }
  CHECK_THROWS_AS((void)tail_probability(batch, 0.0, 0.51), std::invalid_argument);
}

TEST_CASE("simulate is deterministic and matches simulate_terminal") {
  ModelParams p;
  p.hurst = HurstParams::from(0.3);
  p.rho = -0.5;
  p.lambda = 0.2;
  const TimeGrid g = TimeGrid::uniform(16);
  const auto law = InitialLaw::uniform(0.0, 0.2);
  const auto scheme = RescalingScheme::tails(1.0);
  const SimulationBatch a = simulate(p, law, scheme, 0.4, g, 300, 21);
  const SimulationBatch b = simulate(p, law, scheme, 0.4, g, 300, 21);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  const SimulationBatch c = simulate(p, law, scheme, 0.4, g, 300, 22);
  CHECK(a.x != c.x);
  const auto term = simulate_terminal(p, law, scheme, 0.4, g, 9, 300, 21);
  CHECK(term == column(a.x, 9));
}

TEST_CASE("simulate input checks") {
  ModelParams p;
  p.hurst = HurstParams::from(0.3);
  const auto law = InitialLaw::point(0.0);
  CHECK_THROWS_AS((void)simulate(p, law, RescalingScheme::tails(1.0), 0.5, TimeGrid::uniform(8), 10, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)simulate(p, law, RescalingScheme::tails(0.3), 0.5, TimeGrid::uniform(16), 10, 1), std::invalid_argument);
  SimulateOptions o;
  o.allow_b_violation = true;
  CHECK_NOTHROW((void)simulate(p, law, RescalingScheme::tails(0.3), 0.5, TimeGrid::uniform(16), 10, 1, o));
  CHECK_THROWS_AS((void)simulate(p, law, RescalingScheme::tails(1.0), 0.0, TimeGrid::uniform(16), 10, 1), std::invalid_argument);
}

TEST_CASE("Y marginal law matches the scaled gram matrix") {
  const std::size_t n = 20000;
  const TimeGrid g = TimeGrid::uniform(16);
  SUBCASE("tails, H = 1/2, terminal variance") {
    ModelParams p;
    p.xi = 1.3;
    const double eps = 0.5;
    const SimulationBatch b = simulate(p, InitialLaw::point(0.0), RescalingScheme::tails(1.0), eps, g, n, 31);
    const double target = eps * eps * p.xi * p.xi * gram_matrix(KernelSpec::fou(0.5, p.beta, 1.0), g)(15, 15);
    const Stats s = stats(column(b.y, 15));
    CHECK(std::abs(s.var - target) <= 3.0 * target * std::sqrt(2.0 / n));
  }
  SUBCASE("small time, H = 0.3, full covariance") {
    ModelParams p;
    p.hurst = HurstParams::from(0.3);
    const double eps = 0.3;
    const double b = 0.2;
    const SimulationBatch batch = simulate(p, InitialLaw::point(0.0), RescalingScheme::small_time(b), eps, g, n, 32);
    const double scale = std::pow(eps, 0.6 + b) * p.xi;
    const Eigen::MatrixXd target = scale * scale * gram_matrix(KernelSpec::small_time(0.3, p.beta, 1.0, eps), g);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 16; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const Eigen::ArrayXd prod = batch.y.col(i).array() * batch.y.col(j).array();
        const double m = prod.mean();
        const double se = std::sqrt((prod - m).square().sum() / (n - 1.0) / n);
        worst = std::max(worst, std::abs(m - target(i, j)) / se);
      }
    }
    CHECK(worst <= 4.0);
  }
}

TEST_CASE("noise part of X is symmetric when rho = 0") {
  ModelParams p;
  p.hurst = HurstParams::from(0.3);
  p.vol = VolFunction::linear(1.0);
  const TimeGrid g = TimeGrid::uniform(16);
  const double eps = 0.6;
  const std::size_t n = 50000;
  const SimulationBatch b = simulate(p, InitialLaw::uniform(-0.5, 0.5), RescalingScheme::tails(1.0), eps, g, n, 41);
  // The draw of Theta is reproduced from the starting-law stream.
  const auto theta = sample_initial(InitialLaw::uniform(-0.5, 0.5), n, 41);
  std::vector<double> noise(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    double y_prev = eps * theta[r];
    double drift = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      drift -= 0.5 * y_prev * y_prev * g.weight(k);
      y_prev = b.y(row, static_cast<Eigen::Index>(k));
    }
    noise[r] = b.x(row, 15) - drift;
  }
  const Stats s = stats(noise);
  CHECK(std::abs(s.skew) <= 4.0 * std::sqrt(6.0 / n));
}

TEST_CASE("ldp_slope bookkeeping") {
  ModelParams p;
  p.vol = VolFunction::custom(ScalarFn::constant(1.0), ScalarFn::constant(1.0), 1.0, 1.0);
  LdpSlopeOptions o;
  o.grid_n = 16;
  o.simulate.vol_mode = VolMode::ScalingLimit;
  const LdpSlopeResult r = ldp_slope(p, InitialLaw::point(0.0), RescalingScheme::tails(1.0), {0.3, 0.2, 0.1}, 1e6, 1000, 5, o);
  REQUIRE(r.rows.size() == 3);
  for (const LdpRow& row : r.rows) CHECK(row.censored);
  CHECK_FALSE(r.fitted);
  CHECK_THROWS_AS((void)ldp_slope(p, InitialLaw::point(0.0), RescalingScheme::tails(1.0), {0.3, 0.2}, 1.0, 10, 5, o), std::invalid_argument);
}

TEST_CASE("fit_ldp_limit recovers an exact model") {
  const RescalingScheme scheme = RescalingScheme::tails(1.0);
  for (SlopeFit fit : {SlopeFit::AffineEps, SlopeFit::SpeedLog}) {
    LdpSlopeResult r;
    r.fit = fit;
    for (double eps : {0.7, 0.6, 0.5, 0.4}) {
      LdpRow row;
      row.eps = eps;
      row.estimate = make_estimate(500, 100000, 1, "x");
      const double h = scheme.speed(eps, 0.5);
      row.h_eps_log_p = fit == SlopeFit::AffineEps ? -1.1 + 0.4 * eps : -1.1 + 0.3 * h - 0.2 * h * std::log(h);
      r.rows.push_back(row);
    }
    fit_ldp_limit(r, 0.5, scheme);
    CHECK(r.fitted);
    CHECK(r.limit == doctest::Approx(-1.1).epsilon(1e-9));
  }
}
