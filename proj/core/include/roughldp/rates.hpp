#pragma once

#include "roughldp/grid.hpp"
#include "roughldp/kernels.hpp"
#include "roughldp/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roughldp {

enum class ConstraintSense { Equal, AtLeast, AtMost };
[[nodiscard]] std::string_view to_string(ConstraintSense sense);

/// How the starting point u enters the volatility path.
enum class StartShape {
  /// y(t) = u + (K f)(t)
  Constant,
  /// y(t) = u e^{beta t} + (K f)(t)
  Exponential,
};

/// Starting point u, fixed (lo == hi) or free in [lo, hi].
struct StartSpec {
  double lo = 0.0;
  double hi = 0.0;
  StartShape shape = StartShape::Constant;
  double beta = 0.0;

  static StartSpec fixed(double u, StartShape shape = StartShape::Constant, double beta = 0.0);
  static StartSpec interval(double lo, double hi);
  [[nodiscard]] bool is_fixed() const { return lo == hi; }
  /// Coefficient of u in y(t).
  [[nodiscard]] double weight(double t) const;
};

struct ControlVector {
  std::vector<double> f;
  std::vector<double> g;
};

/// Minimize 1/2 (||f||^2 + ||g||^2) over piecewise-constant controls subject
/// to a condition on x at the terminal node, where
///   y = start + K f,
///   x(t) = int_0^t [ -1/2 sigma~(y)^2 (if drift) + sigma~(y) (rho f + rho_bar g) ] ds.
struct VariationalProblem {
  std::string id = "problem";
  KernelSpec kernel = KernelSpec::identity();
  VolFunction vol{};
  double rho = 0.0;
  bool include_drift = false;
  StartSpec start{};
  double level = 1.0;
  ConstraintSense sense = ConstraintSense::Equal;
  TimeGrid grid = TimeGrid::uniform(64);
  /// Node carrying the constraint; the last node when unset.
  std::optional<std::size_t> terminal_node;

  [[nodiscard]] std::size_t terminal() const;
  [[nodiscard]] double rho_bar() const;
  void validate() const;
};

struct PathPair {
  std::vector<double> y;
  std::vector<double> x;
};

/// y and x at the grid nodes for the given controls and starting point
/// (problem.start.lo when u is not given).
[[nodiscard]] PathPair path_from_controls(const VariationalProblem& problem,
                                          const ControlVector& controls,
                                          std::optional<double> u = std::nullopt);

enum class RateStatus { Converged, NotConverged, Infeasible };
[[nodiscard]] std::string_view to_string(RateStatus status);

struct RateResult {
  double value = std::numeric_limits<double>::infinity();
  ControlVector controls;
  std::vector<double> y_path;
  std::vector<double> x_path;
  double start_used = 0.0;
  double level_used = 0.0;
  bool converged = false;
  RateStatus status = RateStatus::NotConverged;
  std::size_t iterations = 0;
  double kkt_residual = std::numeric_limits<double>::infinity();
  std::size_t n_grid = 0;
};

struct SolverOptions {
  std::size_t max_outer = 60;
  std::size_t max_inner = 400;
  /// Accepted violation of the terminal constraint.
  double feasibility_tol = 1e-6;
  /// Stationarity target; results above it are flagged as not converged.
  double kkt_tol = 1e-6;
  /// Equality levels scanned for AtLeast / AtMost constraints.
  std::size_t level_count = 11;
  double level_span = 4.0;
  /// Starting points tried before refinement when u is free.
  std::size_t start_samples = 9;
  /// Starts per equality solve, taken in order from zero controls and six
  /// constant (f, g) patterns rescaled onto the constraint.
  std::size_t multistart = 7;
};

/// Precomputed operator for one problem: terminal value, gradient and the
/// augmented-Lagrangian objective in the scaled variables v = sqrt(w) z.
class RateModel {
 public:
  explicit RateModel(const VariationalProblem& problem);

  [[nodiscard]] const VariationalProblem& problem() const { return problem_; }
  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] const Eigen::MatrixXd& operator_matrix() const { return a_; }

  /// Stacked controls z = (f, g) to scaled variables and back.
  [[nodiscard]] Eigen::VectorXd to_scaled(const ControlVector& c) const;
  [[nodiscard]] ControlVector from_scaled(const Eigen::VectorXd& v) const;

  [[nodiscard]] PathPair paths(const ControlVector& c, double u) const;
  /// x at the terminal node; fills the gradient with respect to v (and u)
  /// when requested.
  [[nodiscard]] double terminal(const Eigen::VectorXd& v, double u, Eigen::VectorXd* grad_v = nullptr,
                                double* grad_u = nullptr) const;

  /// 1/2 |v|^2 - mu c(v) + penalty / 2 c(v)^2 with c = terminal - level.
  [[nodiscard]] double penalized(const Eigen::VectorXd& v, double u, double level, double mu,
                                 double penalty, Eigen::VectorXd* grad = nullptr) const;

 private:
  VariationalProblem problem_;
  std::size_t n_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd sqrt_w_;
  Eigen::VectorXd w_;
};

/// Rate for the problem's constraint. Deterministic: fixed multistart set,
/// deterministic optimizer, ties broken by start index.
[[nodiscard]] RateResult solve(const VariationalProblem& problem, const SolverOptions& options = {});

/// Independent oracle for small grids: ray search over control directions
/// with a compass search on the sphere. The problem is re-gridded on coarse_n
/// uniform nodes (coarse_n <= 8).
[[nodiscard]] double brute_force_rate(const VariationalProblem& problem, std::size_t coarse_n);

struct RateSetup {
  std::size_t grid_n = 64;
  bool include_drift = true;
  SolverOptions solver{};
};

/// inf over y >= y_level of the tails rate (kernel F, drift on, start 0).
[[nodiscard]] RateResult tail_rate(const ModelParams& params, double y_level, double b,
                                   const RateSetup& setup = {});
[[nodiscard]] VariationalProblem tail_problem(const ModelParams& params, double y_level,
                                              const RateSetup& setup = {});

/// inf over y >= k (k > 0) or y <= k (k < 0) of the small-time rate
/// (kernel G_0, no drift, start 0).
[[nodiscard]] RateResult smalltime_rate(const ModelParams& params, double k, double b,
                                        const RateSetup& setup = {});
[[nodiscard]] VariationalProblem smalltime_problem(const ModelParams& params, double k,
                                                   const RateSetup& setup = {});

/// Small-time rate of the diffusive (H = 1/2) system with the starting point
/// free in [u_lo, u_hi].
[[nodiscard]] RateResult rate_with_random_start(const ModelParams& params, double k, double u_lo,
                                                double u_hi, const RateSetup& setup = {});
[[nodiscard]] VariationalProblem random_start_problem(const ModelParams& params, double k,
                                                      double u_lo, double u_hi,
                                                      const RateSetup& setup = {});

}  // namespace roughldp
