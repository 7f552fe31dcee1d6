#include "roughldp/smile.hpp"

#include "roughldp/random.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roughldp {
namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

SmileResult wrap(SmileKind kind, RateResult rate, double k, double t, double b) {
  SmileResult r;
  r.kind = kind;
  r.k = k;
  r.t = t;
  r.b = b;
  r.limit_value = limit_from_rate(kind, k, rate.value);
  r.rate_used = std::move(rate);
  return r;
}

}  // namespace

std::string_view to_string(SmileKind kind) {
  switch (kind) {
    case SmileKind::TailSlope: return "tail_slope";
    case SmileKind::SmallTime: return "small_time";
    case SmileKind::Forward: return "forward";
  }
  return "?";
}

double limit_from_rate(SmileKind kind, double k, double rate) {
  if (std::isnan(rate)) return rate;
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  if (kind == SmileKind::TailSlope) return 0.5 / rate;
  return k * k / (2.0 * rate);
}

SmileResult tail_smile_slope(const ModelParams& params, double b, double t, const RateSetup& setup) {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("tail_smile_slope needs t in (0, 1]");
  if (!(b > 0.0)) throw std::invalid_argument("tail_smile_slope needs b > 0");
  VariationalProblem problem = tail_problem(params, 1.0, setup);
  std::vector<double> nodes(setup.grid_n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i] = t * static_cast<double>(i + 1) / static_cast<double>(nodes.size());
  }
  nodes.back() = t;
  problem.grid = TimeGrid::from_nodes(std::move(nodes));
  SmileResult r = wrap(SmileKind::TailSlope, solve(problem, setup.solver), 1.0, t, b);
  r.formula = "1/(2*inf_{y>=1} rate)";
  return r;
}

SmileResult smalltime_smile(const ModelParams& params, double k, double b, const RateSetup& setup) {
  if (k == 0.0) throw std::invalid_argument("smalltime_smile needs k != 0");
  SmileResult r = wrap(SmileKind::SmallTime, smalltime_rate(params, k, b, setup), k, 0.0, b);
  r.formula = "k^2/(2*inf rate)";
  r.explosion_exponent = b;
  return r;
}

SmileResult forward_smile(const ModelParams& params, double sigma0, double t, double k,
                          double support_radius, const RateSetup& setup) {
  if (!(t > 0.0)) throw std::invalid_argument("forward_smile needs t > 0");
  if (!(support_radius >= 0.0)) throw std::invalid_argument("forward_smile needs support_radius >= 0");
  if (k == 0.0) throw std::invalid_argument("forward_smile needs k != 0");
  const InitialLaw law = InitialLaw::forward_stein_stein(sigma0, t).resolved(params);
  const double sd = std::sqrt(law.b);
  const double lo = law.a - support_radius * sd;
  const double hi = law.a + support_radius * sd;
  SmileResult r = wrap(SmileKind::Forward, rate_with_random_start(params, k, lo, hi, setup), k, t, 0.0);
  r.formula = "k^2/(2*inf_u rate)";
  r.support_lo = lo;
  r.support_hi = hi;
  return r;
}

double bs_call(double forward, double strike, double maturity, double vol) {
  const double sd = vol * std::sqrt(maturity);
  if (sd <= 0.0) return std::max(forward - strike, 0.0);
  const double d1 = std::log(forward / strike) / sd + 0.5 * sd;
  return forward * normal_cdf(d1) - strike * normal_cdf(d1 - sd);
}

double bs_implied_vol(double price, double forward, double strike, double maturity) {
  if (!(forward > 0.0 && strike > 0.0 && maturity > 0.0)) {
    throw std::domain_error("bs_implied_vol needs positive forward, strike and maturity");
  }
  const double intrinsic = std::max(forward - strike, 0.0);
  if (!(price >= intrinsic && price < forward)) {
    throw std::domain_error("call price outside the no-arbitrage bounds");
  }
  if (price == intrinsic) return 0.0;
  auto excess = [&](double v) { return bs_call(forward, strike, maturity, v) - price; };
  double hi = 1.0;
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw std::domain_error("implied volatility above 1e6");
  }
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
  const auto [a, b] = boost::math::tools::toms748_solve(excess, 0.0, hi, intrinsic - price,
                                                        excess(hi), tol, iters);
  return 0.5 * (a + b);
}

std::vector<double> sample_log_price(const ModelParams& params, const InitialLaw& law, double t,
                                     std::size_t n_paths, std::uint64_t seed, std::size_t grid_n) {
  if (!(t > 0.0)) throw std::invalid_argument("maturity must be positive");
  // With b = 0 and eps = sqrt(t) the small-time system is the original model
  // on [0, t] run in unit time, up to X_t = eps^{1 - 2H} X^eps_1.
  const double eps = std::sqrt(t);
  const RescalingScheme scheme = RescalingScheme::small_time(0.0);
  SimulateOptions opts;
  opts.allow_b_violation = true;
  const TimeGrid grid = TimeGrid::uniform(grid_n);
  std::vector<double> x =
      simulate_terminal(params, law, scheme, eps, grid, grid.size() - 1, n_paths, seed, opts);
  const double scale = std::pow(eps, 1.0 - 2.0 * params.hurst.H);
  for (double& v : x) v *= scale;
  return x;
}

std::vector<McSmileRow> mc_smile(const ModelParams& params, const InitialLaw& law, double t,
                                 const std::vector<double>& log_strikes, std::size_t n_paths,
                                 std::uint64_t seed, const McSmileOptions& options) {
  const std::size_t batches = std::max<std::size_t>(options.batches, 2);
  if (n_paths < batches) throw std::invalid_argument("mc_smile needs at least one path per batch");
  const std::vector<double> x = sample_log_price(params, law, t, n_paths, seed, options.grid_n);
  const std::size_t per = n_paths / batches;
  const std::size_t used = per * batches;

  auto invert = [&](double price, double strike) {
    try {
      return bs_implied_vol(price, 1.0, strike, t);
    } catch (const std::domain_error&) {
      return std::nan("");
    }
  };

  std::vector<McSmileRow> rows;
  rows.reserve(log_strikes.size());
  auto rng = make_engine(seed, Stream::Bootstrap, 0);
  std::uniform_int_distribution<std::size_t> pick(0, batches - 1);
  std::vector<std::vector<std::size_t>> draws(options.resamples, std::vector<std::size_t>(batches));
  for (auto& d : draws) {
    for (auto& i : d) i = pick(rng);
  }

  for (double k : log_strikes) {
    const double strike = std::exp(k);
    std::vector<double> batch_mean(batches, 0.0);
    for (std::size_t i = 0; i < used; ++i) {
      batch_mean[i / per] += std::max(std::exp(x[i]) - strike, 0.0);
    }
    double mean = 0.0;
    for (double& m : batch_mean) {
      m /= static_cast<double>(per);
      mean += m;
    }
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (double m : batch_mean) var += (m - mean) * (m - mean);
    var /= static_cast<double>(batches - 1);

    McSmileRow row;
    row.k = k;
    row.price = mean;
    row.price_std_err = std::sqrt(var / static_cast<double>(batches));
    row.vol = invert(mean, strike);
    row.censored = !std::isfinite(row.vol) || row.vol == 0.0;

    double s1 = 0.0;
    double s2 = 0.0;
    std::size_t good = 0;
    for (const auto& d : draws) {
      double p = 0.0;
      for (std::size_t i : d) p += batch_mean[i];
      const double v = invert(p / static_cast<double>(batches), strike);
      if (!std::isfinite(v)) continue;
      s1 += v;
      s2 += v * v;
      ++good;
    }
    if (good > 1) {
      const double m = s1 / static_cast<double>(good);
      row.vol_err = std::sqrt(std::max(0.0, (s2 - static_cast<double>(good) * m * m) /
                                                static_cast<double>(good - 1)));
    } else {
      row.vol_err = std::nan("");
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace roughldp
