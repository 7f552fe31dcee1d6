#pragma once

#include "roughldp/model.hpp"
#include "roughldp/rates.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace roughldp {

enum class SmileKind { TailSlope, SmallTime, Forward };
[[nodiscard]] std::string_view to_string(SmileKind kind);

struct SmileResult {
  SmileKind kind = SmileKind::TailSlope;
  /// Limit of t Sigma^2 / k (TailSlope) or of the rescaled implied variance.
  double limit_value = 0.0;
  RateResult rate_used;
  std::string formula;
  double k = 0.0;
  double t = 1.0;
  double b = 0.0;
  /// Implied volatility blows up like t^{-explosion_exponent} (SmallTime).
  double explosion_exponent = 0.0;
  /// Truncation interval of the starting law (Forward).
  double support_lo = 0.0;
  double support_hi = 0.0;
};

/// Recomputes limit_value from the embedded rate.
[[nodiscard]] double limit_from_rate(SmileKind kind, double k, double rate);

/// lim_{k -> inf} Sigma_t(k)^2 t / k = 1 / (2 inf_{y >= 1} rate) with the
/// constraint placed at time t.
[[nodiscard]] SmileResult tail_smile_slope(const ModelParams& params, double b, double t,
                                           const RateSetup& setup = {});

/// lim_{t -> 0} t^b Sigma_t(t^{1/2 - H - b} k)^2 = k^2 / (2 inf rate).
[[nodiscard]] SmileResult smalltime_smile(const ModelParams& params, double k, double b,
                                          const RateSetup& setup = {});

/// Small-time forward smile started from the law of sigma_t, truncated to
/// mean +- support_radius standard deviations.
[[nodiscard]] SmileResult forward_smile(const ModelParams& params, double sigma0, double t,
                                        double k, double support_radius = 4.0,
                                        const RateSetup& setup = {});

/// Undiscounted Black-Scholes call on a forward.
[[nodiscard]] double bs_call(double forward, double strike, double maturity, double vol);

/// Volatility matching an undiscounted call price; 0 at intrinsic value.
/// Throws std::domain_error outside [max(forward - strike, 0), forward).
[[nodiscard]] double bs_implied_vol(double price, double forward, double strike, double maturity);

struct McSmileRow {
  double k = 0.0;
  double price = 0.0;
  double price_std_err = 0.0;
  double vol = 0.0;
  double vol_err = 0.0;
  /// Price at or beyond a no-arbitrage bound; vol is then 0 or NaN.
  bool censored = false;
};

struct McSmileOptions {
  std::size_t grid_n = 32;
  std::size_t batches = 20;
  std::size_t resamples = 200;
};

/// Monte Carlo calls on e^{X_t} (forward 1) at log-strikes k, inverted to
/// implied volatilities with batch-bootstrap error bars. Rows follow the
/// order of `log_strikes`.
[[nodiscard]] std::vector<McSmileRow> mc_smile(const ModelParams& params, const InitialLaw& law,
                                               double t, const std::vector<double>& log_strikes,
                                               std::size_t n_paths, std::uint64_t seed,
                                               const McSmileOptions& options = {});

/// Log-moneyness X_t under the original model at maturity t for n paths.
[[nodiscard]] std::vector<double> sample_log_price(const ModelParams& params, const InitialLaw& law,
                                                   double t, std::size_t n_paths,
                                                   std::uint64_t seed, std::size_t grid_n = 32);

}  // namespace roughldp
