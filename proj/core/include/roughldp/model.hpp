#pragma once

#include "roughldp/grid.hpp"
#include "roughldp/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace roughldp {

/// Scalar function of the volatility factor with its derivative.
class ScalarFn {
 public:
  enum class Kind { Linear, AffineAbs, Constant, Tabulated };

  ScalarFn() = default;
  /// y -> y
  static ScalarFn linear();
  /// y -> c0 + c1 |y|
  static ScalarFn affine_abs(double c0, double c1);
  static ScalarFn constant(double c);
  /// Piecewise-linear interpolation through (x_k, y_k), extended linearly
  /// beyond the end points.
  static ScalarFn tabulated(std::vector<double> x, std::vector<double> y);

  [[nodiscard]] double operator()(double y) const;
  /// One-sided (right) derivative at kinks.
  [[nodiscard]] double derivative(double y) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double c0() const { return c0_; }
  [[nodiscard]] double c1() const { return c1_; }
  [[nodiscard]] const std::vector<double>& table_x() const { return x_; }
  [[nodiscard]] const std::vector<double>& table_y() const { return y_; }

 private:
  [[nodiscard]] std::size_t segment(double y) const;

  Kind kind_ = Kind::Linear;
  double c0_ = 0.0;
  double c1_ = 1.0;
  std::vector<double> x_;
  std::vector<double> y_;
};

[[nodiscard]] std::string_view to_string(ScalarFn::Kind kind);

/// The volatility function sigma, its scaling limit sigma~ and exponent b:
/// eps^b sigma(y / eps^b) -> sigma~(y).
struct VolFunction {
  ScalarFn sigma = ScalarFn::linear();
  ScalarFn sigma_tilde = ScalarFn::linear();
  double b = 0.5;
  /// Linear growth constant, |sigma(y)| <= C (1 + |y|).
  double growth = 1.0;

  static VolFunction linear(double b = 0.5);
  static VolFunction affine_abs(double c0, double c1, double b = 0.5);
  static VolFunction custom(ScalarFn sigma, ScalarFn sigma_tilde, double b, double growth);

  /// eps^b sigma(y / eps^b).
  [[nodiscard]] double rescaled(double eps, double y) const;
  /// True when |sigma(y)| <= C (1 + |y|) at every lattice point.
  [[nodiscard]] bool satisfies_growth(const std::vector<double>& lattice) const;
};

struct ModelParams {
  double lambda = 0.0;
  double beta = -1.0;
  double xi = 1.0;
  double rho = 0.0;
  HurstParams hurst = HurstParams::from(0.5);
  VolFunction vol{};

  [[nodiscard]] double rho_bar() const;
  /// Throws std::invalid_argument when a coefficient is out of range.
  void validate() const;
};

struct InitialLaw {
  enum class Kind { Point, Uniform, Gaussian, TruncGaussian, ForwardSteinStein };

  Kind kind = Kind::Point;
  double a = 0.0;  // Point: y0; Uniform: lower; Gaussian/TruncGaussian: mean; Forward: sigma0
  double b = 0.0;  // Uniform: upper; Gaussian/TruncGaussian: variance; Forward: t
  double radius = 4.0;  // TruncGaussian: half-width in standard deviations

  static InitialLaw point(double y0);
  static InitialLaw uniform(double lo, double hi);
  static InitialLaw gaussian(double mean, double variance);
  static InitialLaw trunc_gaussian(double mean, double variance, double radius);
  static InitialLaw forward_stein_stein(double sigma0, double t);

  /// ForwardSteinStein becomes the Gaussian law of sigma_t under params;
  /// other kinds are returned unchanged.
  [[nodiscard]] InitialLaw resolved(const ModelParams& params) const;
  [[nodiscard]] bool bounded() const;
  /// [lo, hi] of the support (infinite for Gaussian).
  [[nodiscard]] std::pair<double, double> support() const;
  void validate() const;
};

[[nodiscard]] std::string_view to_string(InitialLaw::Kind kind);

struct RescalingScheme {
  enum class Kind { Tails, SmallTime, DiffusiveSmallTime };

  Kind kind = Kind::Tails;
  double b = 1.0;

  static RescalingScheme tails(double b);
  static RescalingScheme small_time(double b);
  static RescalingScheme diffusive();

  /// Large deviations speed h_eps.
  [[nodiscard]] double speed(double eps, double H) const;
  /// Empty when the X-LDP condition on b holds, otherwise a description.
  [[nodiscard]] std::string violation(double H) const;
};

[[nodiscard]] std::string_view to_string(RescalingScheme::Kind kind);

struct MCEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  std::size_t hits = 0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::string event;
};

[[nodiscard]] MCEstimate make_estimate(std::size_t hits, std::size_t n_paths, std::uint64_t seed,
                                       std::string event);

/// n i.i.d. draws of the starting law (ForwardSteinStein needs params).
[[nodiscard]] std::vector<double> sample_initial(const InitialLaw& law, std::size_t n,
                                                 std::uint64_t seed,
                                                 const ModelParams* params = nullptr);

struct ScalingReport {
  std::vector<double> eps;
  std::vector<double> deviation;
  double tolerance = 1e-8;
  bool pass = false;
};

[[nodiscard]] ScalingReport check_scaling_assumption(const VolFunction& vol,
                                                     const std::vector<double>& eps_ladder,
                                                     const std::vector<double>& lattice,
                                                     double tolerance = 1e-8);

enum class ThetaVerdict { DivergesToMinusInfinity, Stalls };
[[nodiscard]] std::string_view to_string(ThetaVerdict v);

struct ThetaReport {
  std::vector<double> eps;
  /// h_eps log P(eps^b |Theta| > 1); -infinity when the probability is zero.
  std::vector<double> value;
  ThetaVerdict verdict = ThetaVerdict::Stalls;
};

[[nodiscard]] ThetaReport check_theta_assumption(const InitialLaw& law,
                                                 const RescalingScheme& scheme,
                                                 const std::vector<double>& eps_ladder,
                                                 double H = 0.5);

/// log P(N(0,1) > x), accurate far into the tail.
[[nodiscard]] double log_normal_tail(double x);

enum class VolMode {
  /// eps^b sigma(Y / eps^b), the rescaled model itself.
  Exact,
  /// sigma~(Y), its scaling limit.
  ScalingLimit,
};

struct SimulateOptions {
  VolMode vol_mode = VolMode::Exact;
  bool allow_b_violation = false;
  std::size_t min_nodes = 16;
};

struct SimulationBatch {
  TimeGrid grid;
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

/// Rescaled (X^eps, Y^eps) on the grid. Y is exact in law at the nodes; X is
/// an Euler sum driven by the Brownian motion generating Y's Volterra
/// representation (rho) and an independent one (rho_bar).
[[nodiscard]] SimulationBatch simulate(const ModelParams& params, const InitialLaw& law,
                                       const RescalingScheme& scheme, double eps,
                                       const TimeGrid& grid, std::size_t n_paths,
                                       std::uint64_t seed, const SimulateOptions& options = {});

/// X^eps at one node only, without storing paths. Path p is identical to
/// row p of simulate() with the same arguments.
[[nodiscard]] std::vector<double> simulate_terminal(const ModelParams& params,
                                                    const InitialLaw& law,
                                                    const RescalingScheme& scheme, double eps,
                                                    const TimeGrid& grid, std::size_t node,
                                                    std::size_t n_paths, std::uint64_t seed,
                                                    const SimulateOptions& options = {});

[[nodiscard]] MCEstimate tail_probability(const SimulationBatch& batch, double level, double node);
[[nodiscard]] MCEstimate tail_probability(const std::vector<double>& values, double level,
                                          std::uint64_t seed, std::string event);

enum class SlopeFit {
  /// L + c1 eps
  AffineEps,
  /// L + c1 h + c2 h log h with h = h_eps, weighted by the binomial variance.
  SpeedLog,
};
[[nodiscard]] std::string_view to_string(SlopeFit fit);

struct LdpRow {
  double eps = 0.0;
  double level = 0.0;
  MCEstimate estimate;
  double h_eps_log_p = -std::numeric_limits<double>::infinity();
  double residual = 0.0;
  bool censored = false;
};

struct LdpSlopeResult {
  std::vector<LdpRow> rows;
  double limit = 0.0;
  double limit_std_err = 0.0;
  SlopeFit fit = SlopeFit::SpeedLog;
  bool fitted = false;
};

struct LdpSlopeOptions {
  std::size_t grid_n = 32;
  SlopeFit fit = SlopeFit::SpeedLog;
  SimulateOptions simulate{};
};

/// h_eps log P(X^eps_1 >= level) along the ladder and its eps -> 0 limit.
[[nodiscard]] LdpSlopeResult ldp_slope(const ModelParams& params, const InitialLaw& law,
                                       const RescalingScheme& scheme,
                                       const std::vector<double>& eps_ladder, double level,
                                       std::size_t n_paths, std::uint64_t seed,
                                       const LdpSlopeOptions& options = {});

/// Weighted least-squares fit behind ldp_slope; rows with censored set are skipped.
void fit_ldp_limit(LdpSlopeResult& result, double H, const RescalingScheme& scheme);

}  // namespace roughldp
