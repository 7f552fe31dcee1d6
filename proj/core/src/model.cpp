#include "roughldp/model.hpp"

#include "roughldp/parallel.hpp"
#include "roughldp/paths.hpp"
#include "roughldp/random.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roughldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(Q(lo) - Q(hi)) for lo < hi, Q the standard normal upper tail.
double log_normal_band(double lo, double hi) {
  if (!(lo < hi)) return -kInf;
  if (lo > 0.0) {
    const double a = log_normal_tail(lo);
    const double b = log_normal_tail(hi);
    return a + std::log1p(-std::exp(b - a));
  }
  if (hi < 0.0) {
    // Mirror so that the subtraction happens in the small upper tail.
    const double a = log_normal_tail(-hi);
    const double b = log_normal_tail(-lo);
    return a + std::log1p(-std::exp(b - a));
  }
  return std::log1p(-std::exp(log_normal_tail(hi)) - std::exp(log_normal_tail(-lo)));
}

double draw_initial(const InitialLaw& law, std::mt19937_64& rng) {
  switch (law.kind) {
    case InitialLaw::Kind::Point:
      return law.a;
    case InitialLaw::Kind::Uniform: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      return law.a + (law.b - law.a) * u(rng);
    }
    case InitialLaw::Kind::Gaussian: {
      std::normal_distribution<double> n;
      return law.a + std::sqrt(law.b) * n(rng);
    }
    case InitialLaw::Kind::TruncGaussian: {
      if (law.b == 0.0) return law.a;
      const boost::math::normal_distribution<double> normal;
      const double lo = boost::math::cdf(normal, -law.radius);
      const double hi = boost::math::cdf(normal, law.radius);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double p = std::clamp(lo + (hi - lo) * u(rng), lo, hi);
      return law.a + std::sqrt(law.b) * boost::math::quantile(normal, p);
    }
    case InitialLaw::Kind::ForwardSteinStein:
      break;
  }
  throw std::invalid_argument("forward Stein-Stein law must be resolved before sampling");
}

// Coefficients of one rescaled system at a fixed eps.
struct SchemeSetup {
  KernelSpec kernel;      // unit vol-of-vol
  double beta = 0.0;      // mean reversion of Y^eps
  double lambda = 0.0;    // level term of Y^eps
  double start = 1.0;     // Y^eps_0 = start * Theta
  double noise = 0.0;     // multiplies the unit-xi Volterra path
  double x_drift = 0.0;   // multiplies s(Y)^2 dt
  double x_noise = 0.0;   // multiplies s(Y) dB
  double vol_b = 0.0;     // exponent inside eps^b sigma(y / eps^b)
  bool use_tilde = false;
};

SchemeSetup make_setup(const ModelParams& params, const RescalingScheme& scheme, double eps,
                       VolMode mode) {
  SchemeSetup s;
  const double H = params.hurst.H;
  const double b = scheme.b;
  const double eb = std::pow(eps, b);
  switch (scheme.kind) {
    case RescalingScheme::Kind::Tails:
      s.kernel = KernelSpec::fou(H, params.beta, 1.0);
      s.beta = params.beta;
      s.lambda = eb * params.lambda;
      s.start = eb;
      s.noise = eb * params.xi;
      s.x_drift = -0.5;
      s.x_noise = eb;
      s.vol_b = b;
      break;
    case RescalingScheme::Kind::SmallTime: {
      const double e2h = std::pow(eps, 2.0 * H);
      s.kernel = KernelSpec::small_time(H, params.beta, 1.0, eps);
      s.beta = params.beta * eps * eps;
      s.lambda = eb * eps * eps * params.lambda;
      s.start = eb;
      s.noise = e2h * eb * params.xi;
      s.x_drift = -0.5 * e2h * eps;
      s.x_noise = e2h * eb;
      s.vol_b = b;
      break;
    }
    case RescalingScheme::Kind::DiffusiveSmallTime:
      require(params.hurst.minus == 0.0, "DiffusiveSmallTime needs H = 1/2");
      s.kernel = KernelSpec::fou(0.5, params.beta * eps * eps, 1.0);
      s.beta = params.beta * eps * eps;
      s.lambda = eps * eps * params.lambda;
      s.start = 1.0;
      s.noise = eps * params.xi;
      s.x_drift = -0.5 * eps * eps;
      s.x_noise = eps;
      s.use_tilde = true;
      break;
  }
  if (mode == VolMode::ScalingLimit) s.use_tilde = true;
  return s;
}

// One simulated path: X and Y at every node.
class PathSimulator {
 public:
  PathSimulator(const ModelParams& params, const InitialLaw& law, const RescalingScheme& scheme,
                double eps, const TimeGrid& grid, std::uint64_t seed,
                const SimulateOptions& options)
      : params_(params),
        law_(law.resolved(params)),
        grid_(grid),
        seed_(seed),
        setup_(make_setup(params, scheme, eps, options.vol_mode)),
        sampler_(setup_.kernel, grid) {
    const std::size_t n = grid.size();
    mean_decay_.resize(n);
    mean_level_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double e = std::exp(setup_.beta * grid.node(k));
      mean_decay_[k] = e;
      mean_level_[k] = -(setup_.lambda / setup_.beta) * (1.0 - e);
    }
    eps_b_ = std::pow(eps, setup_.vol_b);
  }

  [[nodiscard]] double vol(double y) const {
    if (setup_.use_tilde) return params_.vol.sigma_tilde(y);
    return eps_b_ * params_.vol.sigma(y / eps_b_);
  }

  void run(std::size_t p, std::span<double> x, std::span<double> y) const {
    const std::size_t n = grid_.size();
    auto theta_rng = make_engine(seed_, Stream::InitialLaw, p);
    const double y0 = setup_.start * draw_initial(law_, theta_rng);

    auto rng = make_engine(seed_, Stream::DrivingNoise, p);
    std::vector<double> db(n);
    std::vector<double> z(n);
    sampler_.sample(rng, db, z);
    std::normal_distribution<double> normal;
    const double rho = params_.rho;
    const double rho_bar = params_.rho_bar();

    double x_acc = 0.0;
    double y_prev = y0;
    for (std::size_t k = 0; k < n; ++k) {
      const double dt = grid_.weight(k);
      const double db_perp = std::sqrt(dt) * normal(rng);
      const double s = vol(y_prev);
      x_acc += setup_.x_drift * s * s * dt + setup_.x_noise * s * (rho * db[k] + rho_bar * db_perp);
      const double yk = y0 * mean_decay_[k] + mean_level_[k] + setup_.noise * z[k];
      x[k] = x_acc;
      y[k] = yk;
      y_prev = yk;
    }
  }

 private:
  const ModelParams& params_;
  InitialLaw law_;
  const TimeGrid& grid_;
  std::uint64_t seed_;
  SchemeSetup setup_;
  VolterraSampler sampler_;
  std::vector<double> mean_decay_;
  std::vector<double> mean_level_;
  double eps_b_ = 1.0;
};

void check_simulation_inputs(const ModelParams& params, const InitialLaw& law,
                             const RescalingScheme& scheme, double eps, const TimeGrid& grid,
                             std::size_t n_paths, const SimulateOptions& options) {
  params.validate();
  law.validate();
  require(eps > 0.0, "simulate: eps must be > 0");
  require(n_paths >= 1, "simulate: n_paths must be >= 1");
  require(grid.size() >= options.min_nodes,
          "simulate: grid has " + std::to_string(grid.size()) + " nodes, fewer than " +
              std::to_string(options.min_nodes));
  const std::string violation = scheme.violation(params.hurst.H);
  require(violation.empty() || options.allow_b_violation, "simulate: " + violation);
}

}  // namespace

// ---------------------------------------------------------------- ScalarFn

ScalarFn ScalarFn::linear() { return {}; }

ScalarFn ScalarFn::affine_abs(double c0, double c1) {
  ScalarFn f;
  f.kind_ = Kind::AffineAbs;
  f.c0_ = c0;
  f.c1_ = c1;
  return f;
}

ScalarFn ScalarFn::constant(double c) {
  ScalarFn f;
  f.kind_ = Kind::Constant;
  f.c0_ = c;
  f.c1_ = 0.0;
  return f;
}

ScalarFn ScalarFn::tabulated(std::vector<double> x, std::vector<double> y) {
  require(x.size() >= 2 && x.size() == y.size(), "tabulated function needs >= 2 matching points");
  for (std::size_t k = 1; k < x.size(); ++k) {
    require(x[k] > x[k - 1], "tabulated abscissae must be strictly increasing");
  }
  ScalarFn f;
  f.kind_ = Kind::Tabulated;
  f.x_ = std::move(x);
  f.y_ = std::move(y);
  return f;
}

std::size_t ScalarFn::segment(double y) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), y);
  const auto k = static_cast<std::size_t>(std::distance(x_.begin(), it));
  return std::clamp<std::size_t>(k, 1, x_.size() - 1) - 1;
}

double ScalarFn::operator()(double y) const {
  switch (kind_) {
    case Kind::Linear: return y;
    case Kind::AffineAbs: return c0_ + c1_ * std::abs(y);
    case Kind::Constant: return c0_;
    case Kind::Tabulated: {
      const std::size_t k = segment(y);
      const double w = (y - x_[k]) / (x_[k + 1] - x_[k]);
      return y_[k] + w * (y_[k + 1] - y_[k]);
    }
  }
  return 0.0;
}

double ScalarFn::derivative(double y) const {
  switch (kind_) {
    case Kind::Linear: return 1.0;
    case Kind::AffineAbs: return y < 0.0 ? -c1_ : c1_;
    case Kind::Constant: return 0.0;
    case Kind::Tabulated: {
      const std::size_t k = segment(y);
      return (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
    }
  }
  return 0.0;
}

std::string_view to_string(ScalarFn::Kind kind) {
  switch (kind) {
    case ScalarFn::Kind::Linear: return "linear";
    case ScalarFn::Kind::AffineAbs: return "affine_abs";
    case ScalarFn::Kind::Constant: return "constant";
    case ScalarFn::Kind::Tabulated: return "tabulated";
  }
  return "?";
}

// ------------------------------------------------------------- VolFunction

VolFunction VolFunction::linear(double b) { return {ScalarFn::linear(), ScalarFn::linear(), b, 1.0}; }

VolFunction VolFunction::affine_abs(double c0, double c1, double b) {
  return {ScalarFn::affine_abs(c0, c1), ScalarFn::affine_abs(0.0, c1), b,
          std::max(std::abs(c0), std::abs(c1))};
}

VolFunction VolFunction::custom(ScalarFn sigma, ScalarFn sigma_tilde, double b, double growth) {
  return {std::move(sigma), std::move(sigma_tilde), b, growth};
}

double VolFunction::rescaled(double eps, double y) const {
  const double e = std::pow(eps, b);
  switch (sigma.kind()) {
    case ScalarFn::Kind::Linear: return y;
    case ScalarFn::Kind::AffineAbs: return e * sigma.c0() + sigma.c1() * std::abs(y);
    case ScalarFn::Kind::Constant: return e * sigma.c0();
    case ScalarFn::Kind::Tabulated: break;
  }
  return e * sigma(y / e);
}

bool VolFunction::satisfies_growth(const std::vector<double>& lattice) const {
  return std::all_of(lattice.begin(), lattice.end(), [&](double y) {
    return std::abs(sigma(y)) <= growth * (1.0 + std::abs(y)) * (1.0 + 1e-12);
  });
}

// ------------------------------------------------------------- ModelParams

double ModelParams::rho_bar() const { return std::sqrt((1.0 - rho) * (1.0 + rho)); }

void ModelParams::validate() const {
  require(lambda >= 0.0, "model: lambda must be >= 0");
  require(beta < 0.0, "model: beta must be < 0");
  require(xi >= 0.0, "model: xi must be >= 0");
  require(rho > -1.0 && rho < 1.0, "model: rho must lie in (-1, 1)");
  require(hurst.H > 0.0 && hurst.H < 1.0, "model: H must lie in (0, 1)");
  require(vol.b > 0.0, "model: vol.b must be > 0");
}

// -------------------------------------------------------------- InitialLaw

InitialLaw InitialLaw::point(double y0) { return {Kind::Point, y0, 0.0, 0.0}; }
InitialLaw InitialLaw::uniform(double lo, double hi) { return {Kind::Uniform, lo, hi, 0.0}; }
InitialLaw InitialLaw::gaussian(double mean, double variance) {
  return {Kind::Gaussian, mean, variance, 0.0};
}
InitialLaw InitialLaw::trunc_gaussian(double mean, double variance, double radius) {
  return {Kind::TruncGaussian, mean, variance, radius};
}
InitialLaw InitialLaw::forward_stein_stein(double sigma0, double t) {
  return {Kind::ForwardSteinStein, sigma0, t, 0.0};
}

InitialLaw InitialLaw::resolved(const ModelParams& params) const {
  if (kind != Kind::ForwardSteinStein) return *this;
  const double t = b;
  const double e = std::exp(params.beta * t);
  const double mean = e * (a + params.lambda / params.beta) - params.lambda / params.beta;
  const double variance =
      params.xi * params.xi * std::expm1(2.0 * params.beta * t) / (2.0 * params.beta);
  return gaussian(mean, variance);
}

bool InitialLaw::bounded() const {
  return kind == Kind::Point || kind == Kind::Uniform || kind == Kind::TruncGaussian;
}

std::pair<double, double> InitialLaw::support() const {
  switch (kind) {
    case Kind::Point: return {a, a};
    case Kind::Uniform: return {a, b};
    case Kind::TruncGaussian: {
      const double r = radius * std::sqrt(b);
      return {a - r, a + r};
    }
    default: return {-kInf, kInf};
  }
}

void InitialLaw::validate() const {
  switch (kind) {
    case Kind::Point:
      require(std::isfinite(a), "law: point must be finite");
      break;
    case Kind::Uniform:
      require(a <= b, "law: uniform support is empty (lower > upper)");
      break;
    case Kind::Gaussian:
      require(b >= 0.0, "law: negative variance");
      break;
    case Kind::TruncGaussian:
      require(b >= 0.0, "law: negative variance");
      require(radius > 0.0, "law: truncation radius must be > 0");
      break;
    case Kind::ForwardSteinStein:
      require(b > 0.0, "law: forward time must be > 0");
      break;
  }
}

std::string_view to_string(InitialLaw::Kind kind) {
  switch (kind) {
    case InitialLaw::Kind::Point: return "Point";
    case InitialLaw::Kind::Uniform: return "Uniform";
    case InitialLaw::Kind::Gaussian: return "Gaussian";
    case InitialLaw::Kind::TruncGaussian: return "TruncGaussian";
    case InitialLaw::Kind::ForwardSteinStein: return "ForwardSteinStein";
  }
  return "?";
}

// --------------------------------------------------------- RescalingScheme

RescalingScheme RescalingScheme::tails(double b) { return {Kind::Tails, b}; }
RescalingScheme RescalingScheme::small_time(double b) { return {Kind::SmallTime, b}; }
RescalingScheme RescalingScheme::diffusive() { return {Kind::DiffusiveSmallTime, 0.0}; }

double RescalingScheme::speed(double eps, double H) const {
  switch (kind) {
    case Kind::Tails: return std::pow(eps, 2.0 * b);
    case Kind::SmallTime: return std::pow(eps, 4.0 * H + 2.0 * b);
    case Kind::DiffusiveSmallTime: return eps * eps;
  }
  return 0.0;
}

std::string RescalingScheme::violation(double H) const {
  switch (kind) {
    case Kind::Tails:
      if (b < 0.5) return "Tails needs b >= 1/2 for the X large deviations, got b=" + std::to_string(b);
      break;
    case Kind::SmallTime:
      if (b < 0.5 - 2.0 * H) {
        return "SmallTime needs b >= 1/2 - 2H = " + std::to_string(0.5 - 2.0 * H) +
               ", got b=" + std::to_string(b);
      }
      break;
    case Kind::DiffusiveSmallTime:
      if (H != 0.5) return "DiffusiveSmallTime needs H = 1/2";
      break;
  }
  return {};
}

std::string_view to_string(RescalingScheme::Kind kind) {
  switch (kind) {
    case RescalingScheme::Kind::Tails: return "Tails";
    case RescalingScheme::Kind::SmallTime: return "SmallTime";
    case RescalingScheme::Kind::DiffusiveSmallTime: return "DiffusiveSmallTime";
  }
  return "?";
}

// -------------------------------------------------------------- estimates

MCEstimate make_estimate(std::size_t hits, std::size_t n_paths, std::uint64_t seed,
                         std::string event) {
  MCEstimate e;
  e.hits = hits;
  e.n_paths = n_paths;
  e.seed = seed;
  e.event = std::move(event);
  e.p_hat = n_paths == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n_paths);
  e.std_err = n_paths == 0 ? 0.0 : std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n_paths));
  return e;
}

std::vector<double> sample_initial(const InitialLaw& law, std::size_t n, std::uint64_t seed,
                                   const ModelParams* params) {
  law.validate();
  InitialLaw resolved = law;
  if (law.kind == InitialLaw::Kind::ForwardSteinStein) {
    require(params != nullptr, "sample_initial: forward Stein-Stein law needs model parameters");
    resolved = law.resolved(*params);
  }
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = make_engine(seed, Stream::InitialLaw, i);
    out[i] = draw_initial(resolved, rng);
  });
  return out;
}

// ------------------------------------------------------------------ audits

ScalingReport check_scaling_assumption(const VolFunction& vol, const std::vector<double>& eps_ladder,
                                       const std::vector<double>& lattice, double tolerance) {
  require(!eps_ladder.empty() && !lattice.empty(), "check_scaling_assumption: empty ladder or lattice");
  ScalingReport r;
  r.eps = eps_ladder;
  r.tolerance = tolerance;
  for (double eps : eps_ladder) {
    double worst = 0.0;
    for (double y : lattice) worst = std::max(worst, std::abs(vol.rescaled(eps, y) - vol.sigma_tilde(y)));
    r.deviation.push_back(worst);
  }
  bool monotone = true;
  for (std::size_t k = 1; k < r.deviation.size(); ++k) {
    monotone = monotone && r.deviation[k] <= r.deviation[k - 1];
  }
  r.pass = monotone && r.deviation.back() <= tolerance;
  return r;
}

double log_normal_tail(double x) {
  if (x < -5.0) return std::log1p(-0.5 * std::erfc(-x / std::numbers::sqrt2));
  if (x < 30.0) return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r + 3.0 * r * r - 15.0 * r * r * r + 105.0 * r * r * r * r;
  return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

std::string_view to_string(ThetaVerdict v) {
  return v == ThetaVerdict::DivergesToMinusInfinity ? "DIVERGES_TO_MINUS_INFINITY" : "STALLS";
}

ThetaReport check_theta_assumption(const InitialLaw& law, const RescalingScheme& scheme,
                                   const std::vector<double>& eps_ladder, double H) {
  law.validate();
  require(law.kind != InitialLaw::Kind::ForwardSteinStein,
          "check_theta_assumption: resolve the forward law to a Gaussian first");
  require(!eps_ladder.empty(), "check_theta_assumption: empty ladder");
  ThetaReport r;
  r.eps = eps_ladder;
  for (double eps : eps_ladder) {
    require(eps > 0.0, "check_theta_assumption: eps must be > 0");
    const double c = std::pow(eps, -scheme.b);  // P(|Theta| > c)
    double log_p = -kInf;
    switch (law.kind) {
      case InitialLaw::Kind::Point:
        log_p = std::abs(law.a) > c ? 0.0 : -kInf;
        break;
      case InitialLaw::Kind::Uniform: {
        if (law.a == law.b) {
          log_p = std::abs(law.a) > c ? 0.0 : -kInf;
          break;
        }
        const double upper = std::max(0.0, law.b - std::max(c, law.a));
        const double lower = std::max(0.0, std::min(-c, law.b) - law.a);
        const double mass = (upper + lower) / (law.b - law.a);
        log_p = mass > 0.0 ? std::log(mass) : -kInf;
        break;
      }
      case InitialLaw::Kind::Gaussian: {
        if (law.b == 0.0) {
          log_p = std::abs(law.a) > c ? 0.0 : -kInf;
          break;
        }
        const double sd = std::sqrt(law.b);
        log_p = log_add(log_normal_tail((c - law.a) / sd), log_normal_tail((c + law.a) / sd));
        break;
      }
      case InitialLaw::Kind::TruncGaussian: {
        if (law.b == 0.0) {
          log_p = std::abs(law.a) > c ? 0.0 : -kInf;
          break;
        }
        const double sd = std::sqrt(law.b);
        const double rad = law.radius;
        const double up = log_normal_band(std::max((c - law.a) / sd, -rad), rad);
        const double down = log_normal_band(std::max((c + law.a) / sd, -rad), rad);
        log_p = log_add(up, down) - log_normal_band(-rad, rad);
        break;
      }
      case InitialLaw::Kind::ForwardSteinStein:
        break;
    }
    r.value.push_back(log_p == -kInf ? -kInf : scheme.speed(eps, H) * log_p);
  }
  const auto& v = r.value;
  bool diverges = v.back() == -kInf;
  if (!diverges && v.size() >= 3) {
    // Steps that keep going down without shrinking point to a divergence.
    bool growing = true;
    for (std::size_t k = 2; k < v.size(); ++k) {
      const double d1 = v[k - 1] - v[k - 2];
      const double d2 = v[k] - v[k - 1];
      growing = growing && d2 < 0.0 && d1 < 0.0 && std::abs(d2) >= std::abs(d1);
    }
    diverges = growing;
  }
  r.verdict = diverges ? ThetaVerdict::DivergesToMinusInfinity : ThetaVerdict::Stalls;
  return r;
}

// -------------------------------------------------------------- simulation

SimulationBatch simulate(const ModelParams& params, const InitialLaw& law,
                         const RescalingScheme& scheme, double eps, const TimeGrid& grid,
                         std::size_t n_paths, std::uint64_t seed, const SimulateOptions& options) {
  check_simulation_inputs(params, law, scheme, eps, grid, n_paths, options);
  const PathSimulator sim(params, law, scheme, eps, grid, seed, options);
  const std::size_t n = grid.size();
  SimulationBatch batch{grid, Eigen::MatrixXd(n_paths, n), Eigen::MatrixXd(n_paths, n), eps, seed};
  parallel_for(n_paths, [&](std::size_t p) {
    std::vector<double> x(n);
    std::vector<double> y(n);
    sim.run(p, x, y);
    for (std::size_t k = 0; k < n; ++k) {
      batch.x(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = x[k];
      batch.y(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = y[k];
    }
  });
  return batch;
}

std::vector<double> simulate_terminal(const ModelParams& params, const InitialLaw& law,
                                      const RescalingScheme& scheme, double eps,
                                      const TimeGrid& grid, std::size_t node, std::size_t n_paths,
                                      std::uint64_t seed, const SimulateOptions& options) {
  check_simulation_inputs(params, law, scheme, eps, grid, n_paths, options);
  require(node < grid.size(), "simulate_terminal: node index out of range");
  const PathSimulator sim(params, law, scheme, eps, grid, seed, options);
  std::vector<double> out(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    std::vector<double> x(grid.size());
    std::vector<double> y(grid.size());
    sim.run(p, x, y);
    out[p] = x[node];
  });
  return out;
}

MCEstimate tail_probability(const SimulationBatch& batch, double level, double node) {
  const auto k = static_cast<Eigen::Index>(batch.grid.index_of(node));
  const auto hits = static_cast<std::size_t>((batch.x.col(k).array() >= level).count());
  return make_estimate(hits, static_cast<std::size_t>(batch.x.rows()), batch.seed,
                       "X(" + std::to_string(node) + ") >= " + std::to_string(level));
}

MCEstimate tail_probability(const std::vector<double>& values, double level, std::uint64_t seed,
                            std::string event) {
  const auto hits = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [&](double v) { return v >= level; }));
  return make_estimate(hits, values.size(), seed, std::move(event));
}

// --------------------------------------------------------------- LDP slope

std::string_view to_string(SlopeFit fit) {
  return fit == SlopeFit::AffineEps ? "affine_eps" : "speed_log";
}

void fit_ldp_limit(LdpSlopeResult& result, double H, const RescalingScheme& scheme) {
  const std::size_t terms = result.fit == SlopeFit::AffineEps ? 2 : 3;
  std::vector<LdpRow*> used;
  for (auto& row : result.rows) {
    if (!row.censored) used.push_back(&row);
  }
  result.fitted = used.size() >= terms;
  if (!result.fitted) return;

  const auto m = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd design(m, static_cast<Eigen::Index>(terms));
  Eigen::VectorXd target(m);
  Eigen::VectorXd weight(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const LdpRow& row = *used[static_cast<std::size_t>(r)];
    const double h = scheme.speed(row.eps, H);
    design(r, 0) = 1.0;
    if (result.fit == SlopeFit::AffineEps) {
      design(r, 1) = row.eps;
    } else {
      design(r, 1) = h;
      design(r, 2) = h * std::log(h);
    }
    target[r] = row.h_eps_log_p;
    // Delta method: Var(h log p_hat) = h^2 (1 - p) / (n p).
    const double p = row.estimate.p_hat;
    const double var = h * h * (1.0 - p) / (static_cast<double>(row.estimate.n_paths) * p);
    weight[r] = 1.0 / std::max(var, 1e-300);
  }
  const Eigen::MatrixXd normal = design.transpose() * weight.asDiagonal() * design;
  const Eigen::MatrixXd cov = normal.inverse();
  const Eigen::VectorXd coef = cov * design.transpose() * weight.asDiagonal() * target;
  result.limit = coef[0];
  result.limit_std_err = std::sqrt(cov(0, 0));
  const Eigen::VectorXd fitted = design * coef;
  for (Eigen::Index r = 0; r < m; ++r) {
    used[static_cast<std::size_t>(r)]->residual = target[r] - fitted[r];
  }
}

LdpSlopeResult ldp_slope(const ModelParams& params, const InitialLaw& law,
                         const RescalingScheme& scheme, const std::vector<double>& eps_ladder,
                         double level, std::size_t n_paths, std::uint64_t seed,
                         const LdpSlopeOptions& options) {
  require(eps_ladder.size() >= 3, "ldp_slope: needs at least 3 ladder points");
  const TimeGrid grid = TimeGrid::uniform(options.grid_n);
  LdpSlopeResult result;
  result.fit = options.fit;
  for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
    const double eps = eps_ladder[k];
    const std::uint64_t row_seed = seed + k;
    const std::vector<double> x = simulate_terminal(params, law, scheme, eps, grid,
                                                    grid.size() - 1, n_paths, row_seed,
                                                    options.simulate);
    LdpRow row;
    row.eps = eps;
    row.level = level;
    row.estimate = tail_probability(x, level, row_seed, "X(1) >= " + std::to_string(level));
    row.censored = row.estimate.hits == 0;
    if (!row.censored) {
      row.h_eps_log_p = scheme.speed(eps, params.hurst.H) * std::log(row.estimate.p_hat);
    }
    result.rows.push_back(row);
  }
  fit_ldp_limit(result, params.hurst.H, scheme);
  return result;
}

}  // namespace roughldp
