#pragma once

#include "roughldp/grid.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace roughldp {

struct HurstParams {
  double H = 0.5;
  double minus = 0.0;  // H - 1/2
  double plus = 1.0;   // H + 1/2
  double kappa = 1.0;

  /// Throws std::domain_error unless 0 < H < 1.
  static HurstParams from(double H);
};

/// Normalizing constant of the Volterra representation of fBm.
[[nodiscard]] double kappa(double H);

enum class KernelKind { Fbm, FractionalOU, SmallTimeEps, SmallTimeLimit, Identity };

/// Names used in configs and CSV: K_fbm, F_fou, G_eps, G_zero, Identity.
[[nodiscard]] std::string_view to_string(KernelKind kind);
/// Inverse of to_string; throws std::invalid_argument on an unknown name.
[[nodiscard]] KernelKind kernel_kind_from_string(std::string_view name);

struct KernelSpec {
  KernelKind kind = KernelKind::Identity;
  HurstParams hurst{};
  double beta = 0.0;
  double xi = 1.0;
  double eps = 0.0;

  static KernelSpec fbm(double H);
  static KernelSpec fou(double H, double beta, double xi);
  static KernelSpec small_time(double H, double beta, double xi, double eps);
  static KernelSpec small_time_limit(double H, double xi);
  static KernelSpec identity();

  /// Mean reversion seen by the F-type integral (beta * eps^2 for G_eps).
  [[nodiscard]] double effective_beta() const;
  /// Exponent of the s -> 0 blow-up, 0 at H = 1/2 and for Identity.
  [[nodiscard]] double origin_exponent() const;
  /// Exponent of the s -> t behaviour (t - s)^a.
  [[nodiscard]] double diagonal_exponent() const;

  /// Throws std::invalid_argument on nonpositive xi or negative eps.
  void validate() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Phi(t, s) for 0 < s < t <= 1.
[[nodiscard]] double eval_kernel(const KernelSpec& spec, double t, double s);

/// Same as eval_kernel with the gap t - s supplied separately, for callers
/// that know it more accurately than the subtraction would give.
[[nodiscard]] double eval_kernel_gap(const KernelSpec& spec, double t, double s, double gap);

/// Lower-triangular matrix A with A(i, j) = integral of Phi(t_i, s) over cell j,
/// so that A * f is the kernel image of a piecewise-constant control.
[[nodiscard]] Eigen::MatrixXd operator_matrix(const KernelSpec& spec, const TimeGrid& grid);

/// t_i -> int_0^{t_i} Phi(t_i, s) f(s) ds for piecewise-constant f.
[[nodiscard]] std::vector<double> apply_operator(const KernelSpec& spec, std::span<const double> f,
                                                 const TimeGrid& grid);

/// 1/2 (||f||^2 + ||g||^2) in L2 for piecewise-constant controls.
[[nodiscard]] double l2_energy(std::span<const double> f, std::span<const double> g,
                               const TimeGrid& grid);

/// G(i, j) = int_0^{min(t_i, t_j)} Phi(t_i, r) Phi(t_j, r) dr.
[[nodiscard]] Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const TimeGrid& grid);

}  // namespace roughldp
