#include "roughldp/cli/verify.hpp"

#include "roughldp/kernels.hpp"
#include "roughldp/model.hpp"
#include "roughldp/paths.hpp"
#include "roughldp/random.hpp"
#include "roughldp/rates.hpp"
#include "roughldp/smile.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace roughldp::cli {
namespace {

struct Named {
  const char* name;
  double budget;
  std::function<CriterionOutcome(const VerifyScale&)> run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::size_t scaled(std::size_t n, const VerifyScale& s) {
  return std::max<std::size_t>(1000, static_cast<std::size_t>(static_cast<double>(n) * s.path_factor));
}

CriterionOutcome kernel_reductions(const VerifyScale&) {
  const KernelSpec k = KernelSpec::fbm(0.5);
  const double beta = -1.3;
  const double xi = 0.7;
  const KernelSpec f = KernelSpec::fou(0.5, beta, xi);
  const KernelSpec g = KernelSpec::small_time_limit(0.5, xi);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double t = 1e-3 + (1.0 - 1e-3) * unit(rng);
    const double s = t * (1e-6 + (1.0 - 2e-6) * unit(rng));
    worst = std::max(worst, std::abs(eval_kernel(k, t, s) - 1.0));
    worst = std::max(worst, std::abs(eval_kernel(f, t, s) - xi * std::exp(beta * (t - s))));
    worst = std::max(worst, std::abs(eval_kernel(g, t, s) - xi));
  }
  return {1, "", worst <= 1e-12, "max abs error " + fmt(worst), 0, 0};
}

CriterionOutcome beta_zero(const VerifyScale&) {
  const double xi = 0.8;
  double worst = 0.0;
  for (double H : {0.3, 0.7}) {
    const KernelSpec f = KernelSpec::fou(H, 1e-6, xi);
    const KernelSpec k = KernelSpec::fbm(H);
    std::mt19937_64 rng(static_cast<std::uint64_t>(H * 100));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double t = 0.01 + 0.99 * unit(rng);
      const double s = t * (0.001 + 0.998 * unit(rng));
      const double ref = xi * eval_kernel(k, t, s);
      worst = std::max(worst, std::abs(eval_kernel(f, t, s) - ref) / std::abs(ref));
    }
  }
  return {2, "", worst <= 1e-4, "max relative gap " + fmt(worst), 0, 0};
}

struct Moments {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd se;
};

Moments second_moments(const Eigen::MatrixXd& x) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index m = x.cols();
  Moments out{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Eigen::ArrayXd p = x.col(i).array() * x.col(j).array();
      const double mean = p.mean();
      const double var = (p - mean).square().sum() / (n - 1.0);
      out.cov(i, j) = out.cov(j, i) = mean;
      out.se(i, j) = out.se(j, i) = std::sqrt(var / n);
    }
  }
  return out;
}

CriterionOutcome law_equality(const VerifyScale& scale) {
  const TimeGrid grid = TimeGrid::uniform(8);
  const std::size_t n = scaled(100000, scale);
  bool pass = true;
  std::ostringstream detail;
  for (double H : {0.3, 0.5, 0.7}) {
    const GaussianPathBatch kd =
        sample_fou(H, -1.0, 1.0, grid, n, scale.seed, Construction::KernelDriven);
    const GaussianPathBatch pr =
        sample_fou(H, -1.0, 1.0, grid, n, scale.seed + 1, Construction::ProductRule);
    const Eigen::MatrixXd gram = gram_matrix(KernelSpec::fou(H, -1.0, 1.0), grid);
    const Moments a = second_moments(kd.values);
    const Moments b = second_moments(pr.values);
    const double z_pair =
        ((a.cov - b.cov).array().abs() / (a.se.array().square() + b.se.array().square()).sqrt()).maxCoeff();
    const double z_kd = ((a.cov - gram).array().abs() / a.se.array()).maxCoeff();
    const double z_pr = ((b.cov - gram).array().abs() / b.se.array()).maxCoeff();
    pass = pass && z_pair <= 3.0 && z_kd <= 3.0 && z_pr <= 3.0;
    detail << "H=" << H << " max z (KD-PR " << fmt(z_pair) << ", KD-gram " << fmt(z_kd)
           << ", PR-gram " << fmt(z_pr) << ") ";
  }
  return {3, "", pass, detail.str(), 0, 0};
}

VolFunction constant_vol() {
  return VolFunction::custom(ScalarFn::constant(1.0), ScalarFn::constant(1.0), 1.0, 1.0);
}

CriterionOutcome oracle_equivalence(const VerifyScale&) {
  struct Case {
    const char* name;
    VariationalProblem p;
  };
  std::vector<Case> cases;
  auto base = [](KernelSpec kernel, VolFunction vol, bool drift, double rho, ConstraintSense sense) {
    VariationalProblem p;
    p.kernel = kernel;
    p.vol = vol;
    p.include_drift = drift;
    p.rho = rho;
    p.level = 1.0;
    p.sense = sense;
    p.grid = TimeGrid::uniform(6);
    return p;
  };
  const KernelSpec g0 = KernelSpec::small_time_limit(0.5, 1.0);
  const KernelSpec fk = KernelSpec::fou(0.3, -1.0, 1.0);
  cases.push_back({"Identity/constant", base(KernelSpec::identity(), constant_vol(), true, 0.0, ConstraintSense::AtLeast)});
  cases.push_back({"Identity/linear", base(KernelSpec::identity(), VolFunction::linear(0.5), false, -0.5, ConstraintSense::Equal)});
  cases.push_back({"G0/constant", base(g0, constant_vol(), false, 0.3, ConstraintSense::AtLeast)});
  cases.push_back({"G0/linear", base(g0, VolFunction::linear(0.5), false, 0.0, ConstraintSense::Equal)});
  cases.push_back({"F/constant", base(fk, constant_vol(), true, -0.4, ConstraintSense::AtLeast)});
  cases.push_back({"F/linear", base(fk, VolFunction::linear(1.0), true, -0.5, ConstraintSense::AtLeast)});

  bool pass = true;
  std::ostringstream detail;
  double worst = 0.0;
  for (const Case& c : cases) {
    const RateResult r = solve(c.p);
    const double oracle = brute_force_rate(c.p, 6);
    const double gap = std::abs(r.value - oracle);
    worst = std::max(worst, gap);
    pass = pass && r.converged && gap <= 1e-3;
  }
  VariationalProblem schilder = base(KernelSpec::identity(), constant_vol(), false, 0.0, ConstraintSense::AtLeast);
  schilder.grid = TimeGrid::uniform(64);
  const double sv = solve(schilder).value;
  pass = pass && std::abs(sv - 0.5) <= 1e-6;
  detail << "max |solve - brute| " << fmt(worst) << " over " << cases.size()
         << " problems; Schilder " << fmt(sv);
  return {4, "", pass, detail.str(), 0, 0};
}

CriterionOutcome homogeneity_symmetry(const VerifyScale&) {
  ModelParams p;
  p.hurst = HurstParams::from(0.3);
  p.xi = 1.0;
  p.rho = -0.4;
  p.vol = VolFunction::linear(0.2);
  RateSetup setup;
  setup.grid_n = 32;
  const double v1 = smalltime_rate(p, 0.5, 0.2, setup).value;
  const double v2 = smalltime_rate(p, 1.0, 0.2, setup).value;
  p.rho = 0.0;
  const double vp = smalltime_rate(p, 0.5, 0.2, setup).value;
  const double vm = smalltime_rate(p, -0.5, 0.2, setup).value;
  const double ratio = v2 / v1;
  const bool pass = ratio >= 1.98 && ratio <= 2.02 && std::abs(vp - vm) <= 1e-4;
  return {5, "", pass, "value(2k)/value(k) " + fmt(ratio) + ", |value(k) - value(-k)| " + fmt(std::abs(vp - vm)), 0, 0};
}

CriterionOutcome gradient_check(const VerifyScale& scale) {
  ModelParams p;
  p.hurst = HurstParams::from(0.3);
  p.beta = -1.0;
  p.xi = 1.0;
  p.rho = -0.5;
  p.vol = VolFunction::linear(1.0);
  RateSetup setup;
  setup.grid_n = 16;
  const RateModel model(tail_problem(p, 1.0, setup));
  std::mt19937_64 rng(scale.seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * model.size());
  for (int k = 0; k < 10; ++k) {
    Eigen::VectorXd v(dim);
    for (double& x : v) x = normal(rng);
    const double mu = normal(rng);
    const double penalty = 10.0;
    Eigen::VectorXd grad;
    (void)model.penalized(v, 0.0, 1.0, mu, penalty, &grad);
    Eigen::VectorXd fd(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double h = 1e-5 * std::max(1.0, std::abs(v[i]));
      Eigen::VectorXd up = v;
      Eigen::VectorXd dn = v;
      up[i] += h;
      dn[i] -= h;
      fd[i] = (model.penalized(up, 0.0, 1.0, mu, penalty) - model.penalized(dn, 0.0, 1.0, mu, penalty)) / (2.0 * h);
    }
    worst = std::max(worst, (grad - fd).norm() / grad.norm());
  }
  return {6, "", worst <= 1e-6, "max relative error " + fmt(worst), 0, 0};
}

CriterionOutcome ldp_gaussian(const VerifyScale& scale) {
  ModelParams p;
  p.lambda = 0.0;
  p.beta = -1.0;
  p.xi = 1.0;
  p.rho = 0.0;
  p.vol = constant_vol();
  const RescalingScheme scheme = RescalingScheme::tails(1.0);
  LdpSlopeOptions opts;
  opts.grid_n = 16;
  opts.simulate.vol_mode = VolMode::ScalingLimit;
  const LdpSlopeResult fit = ldp_slope(p, InitialLaw::point(0.0), scheme, {0.7, 0.6, 0.5, 0.4}, 1.0,
                                       scaled(1000000, scale), scale.seed, opts);
  RateSetup setup;
  setup.grid_n = 16;
  const double rate = tail_rate(p, 1.0, 1.0, setup).value;
  const double rel = std::abs(fit.limit + rate) / rate;
  return {7, "", fit.fitted && rel <= 0.15,
          "fitted limit " + fmt(fit.limit) + " +- " + fmt(fit.limit_std_err) + " vs -rate " + fmt(-rate) +
              " (relative gap " + fmt(rel) + ")",
          0, 0};
}

CriterionOutcome wings(const VerifyScale& scale) {
  ModelParams p;
  p.lambda = 0.0;
  p.beta = -1.0;
  p.xi = 1.0;
  p.rho = -0.3;
  p.hurst = HurstParams::from(0.5);
  p.vol = VolFunction::linear(0.5);
  const RescalingScheme scheme = RescalingScheme::tails(0.5);
  const std::vector<double> ladder{0.7, 0.6, 0.5, 0.4};
  const std::size_t n = scaled(400000, scale);
  LdpSlopeOptions opts;
  opts.grid_n = 32;
  const LdpSlopeResult a = ldp_slope(p, InitialLaw::point(0.1), scheme, ladder, 1.0, n, scale.seed, opts);
  const LdpSlopeResult b = ldp_slope(p, InitialLaw::uniform(0.0, 0.2), scheme, ladder, 1.0, n, scale.seed, opts);
  const double band = std::hypot(a.limit_std_err, b.limit_std_err);
  const double gap = std::abs(a.limit - b.limit);

  RateSetup setup;
  setup.grid_n = 32;
  const SmileResult sa = tail_smile_slope(p, 0.5, 1.0, setup);
  const SmileResult sb = tail_smile_slope(p, 0.5, 1.0, setup);
  const bool same = std::memcmp(&sa.limit_value, &sb.limit_value, sizeof(double)) == 0 &&
                    sa.rate_used.controls.f == sb.rate_used.controls.f &&
                    sa.rate_used.controls.g == sb.rate_used.controls.g;
  return {8, "", a.fitted && b.fitted && gap <= band && same,
          "limits " + fmt(a.limit) + " vs " + fmt(b.limit) + " (gap " + fmt(gap) + ", band " + fmt(band) +
              "); tail slope " + fmt(sa.limit_value) + (same ? " identical" : " differs"),
          0, 0};
}

CriterionOutcome explosion(const VerifyScale& scale) {
  ModelParams p;
  p.lambda = 0.0;
  p.beta = -1.0;
  p.xi = 1.0;
  p.rho = 0.0;
  p.hurst = HurstParams::from(0.3);
  p.vol = VolFunction::linear(0.2);
  const double b = 0.2;
  const double k = 0.15;
  const std::vector<double> ts{0.04, 0.02, 0.01};
  std::vector<double> lx;
  std::vector<double> ly;
  std::ostringstream detail;
  for (double t : ts) {
    const double strike = std::pow(t, 0.5 - p.hurst.H - b) * k;
    const auto rows = mc_smile(p, InitialLaw::point(0.0), t, {strike}, scaled(1000000, scale), scale.seed);
    if (rows[0].censored) {
      detail << "t=" << t << " censored; ";
      continue;
    }
    lx.push_back(std::log(t));
    ly.push_back(2.0 * std::log(rows[0].vol));
    detail << "t=" << t << " vol " << fmt(rows[0].vol) << "; ";
  }
  if (lx.size() < 2) return {9, "", false, detail.str() + "too few uncensored maturities", 0, 0};
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  detail << "slope " << fmt(slope) << " vs " << fmt(-b);
  return {9, "", std::abs(slope + b) <= 0.15 * b, detail.str(), 0, 0};
}

CriterionOutcome audits(const VerifyScale&) {
  const std::vector<double> ladder{0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  const RescalingScheme tails = RescalingScheme::tails(1.0);
  bool pass = true;
  for (const InitialLaw& law : {InitialLaw::point(0.3), InitialLaw::uniform(-1.0, 2.0),
                                InitialLaw::trunc_gaussian(0.0, 1.0, 4.0)}) {
    const ThetaReport r = check_theta_assumption(law, tails, ladder);
    pass = pass && r.verdict == ThetaVerdict::DivergesToMinusInfinity;
  }
  const ThetaReport g = check_theta_assumption(InitialLaw::gaussian(0.0, 1.0), tails, ladder);
  pass = pass && g.verdict == ThetaVerdict::Stalls;
  std::vector<double> lattice;
  for (int i = -50; i <= 50; ++i) lattice.push_back(0.37 * i);
  const ScalingReport s = check_scaling_assumption(VolFunction::linear(0.5), {0.5, 0.1, 0.01}, lattice);
  const double dev = *std::max_element(s.deviation.begin(), s.deviation.end());
  pass = pass && s.pass && dev == 0.0;
  return {10, "", pass,
          "bounded laws diverge, Gaussian " + std::string(to_string(g.verdict)) + ", linear deviation " + fmt(dev),
          0, 0};
}

const std::map<int, Named>& registry() {
  static const std::map<int, Named> r{
      {1, {"kernel reductions at H = 1/2", 1.0, kernel_reductions}},
      {2, {"beta -> 0 reduction", 30.0, beta_zero}},
      {3, {"fOU law equality across constructions", 120.0, law_equality}},
      {4, {"rate solver oracle equivalence", 300.0, oracle_equivalence}},
      {5, {"rate homogeneity and symmetry", 0.0, homogeneity_symmetry}},
      {6, {"penalized objective gradient", 0.0, gradient_check}},
      {7, {"LDP slope, Gaussian-solvable case", 600.0, ldp_gaussian}},
      {8, {"wings independence of the starting law", 0.0, wings}},
      {9, {"small-time explosion exponent", 900.0, explosion}},
      {10, {"assumption audits", 0.0, audits}},
  };
  return r;
}

}  // namespace

const std::vector<int>& expected_failures() {
  static const std::vector<int> ids{9};
  return ids;
}

std::string criterion_name(int id) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw std::invalid_argument("unknown criterion " + std::to_string(id));
  return it->second.name;
}

CriterionOutcome run_criterion(int id, const VerifyScale& scale) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw std::invalid_argument("unknown criterion " + std::to_string(id));
  const auto start = std::chrono::steady_clock::now();
  CriterionOutcome out;
  try {
    out = it->second.run(scale);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  out.id = id;
  out.name = it->second.name;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.budget_seconds = it->second.budget;
  if (out.budget_seconds > 0.0 && out.seconds > out.budget_seconds) {
    out.pass = false;
    out.detail += " (over the " + fmt(out.budget_seconds) + " s budget)";
  }
  return out;
}

void print_outcome(std::ostream& os, const CriterionOutcome& o) {
  os << (o.pass ? "PASS" : "FAIL") << " [" << o.id << "] " << o.name << " (" << fmt(o.seconds)
     << " s): " << o.detail << '\n';
}

}  // namespace roughldp::cli
