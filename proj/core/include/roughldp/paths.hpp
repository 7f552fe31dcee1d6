#pragma once

#include "roughldp/grid.hpp"
#include "roughldp/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace roughldp {

enum class Construction { CovFactor, KernelDriven, ProductRule };

[[nodiscard]] std::string_view to_string(Construction c);
[[nodiscard]] Construction construction_from_string(std::string_view name);

/// Sample paths on a grid, one row per path. Every process starts at zero
/// at t = 0, which is not itself a grid node.
struct GaussianPathBatch {
  TimeGrid grid;
  Eigen::MatrixXd values;
  std::uint64_t seed = 0;
  Construction construction = Construction::CovFactor;

  [[nodiscard]] std::size_t n_paths() const { return static_cast<std::size_t>(values.rows()); }
};

[[nodiscard]] double fbm_covariance(double H, double t, double s);
[[nodiscard]] Eigen::MatrixXd fbm_covariance_matrix(double H, const TimeGrid& grid);

/// Lower Cholesky factor; throws ConvergenceError naming the smallest pivot
/// when the matrix is not numerically positive definite.
[[nodiscard]] Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov, const char* what);

[[nodiscard]] GaussianPathBatch sample_fbm(double H, const TimeGrid& grid, std::size_t n_paths,
                                           std::uint64_t seed);

struct FouOptions {
  /// ProductRule: fBm substeps per grid cell for the convolution integral
  /// (reduced automatically so the refined grid stays at most 1024 nodes).
  std::size_t substeps = 16;
};

/// Fractional OU paths xi int_0^t e^{beta (t - s)} dW^H_s.
[[nodiscard]] GaussianPathBatch sample_fou(double H, double beta, double xi, const TimeGrid& grid,
                                           std::size_t n_paths, std::uint64_t seed,
                                           Construction construction, FouOptions options = {});

/// Exact joint law of a Volterra process Z_t = int_0^t Phi(t, s) dB_s and the
/// cell increments of its driving Brownian motion B on a grid.
///
/// The increments are drawn first; Z is their linear projection plus an
/// independent Gaussian residual carrying the within-cell part of the
/// integral. Both pieces come from operator_matrix and gram_matrix, so the
/// pair has the exact joint covariance at the grid nodes.
class VolterraSampler {
 public:
  VolterraSampler(const KernelSpec& spec, const TimeGrid& grid);

  [[nodiscard]] std::size_t size() const { return n_; }
  /// Consumes 2n standard normals from rng.
  void sample(std::mt19937_64& rng, std::span<double> increments, std::span<double> path) const;

  [[nodiscard]] const Eigen::MatrixXd& projection() const { return projection_; }
  [[nodiscard]] const Eigen::MatrixXd& residual_factor() const { return residual_; }

 private:
  std::size_t n_ = 0;
  Eigen::VectorXd sqrt_dt_;
  Eigen::MatrixXd projection_;  // A D^{-1}
  Eigen::MatrixXd residual_;    // square root of G - A D^{-1} A^T
};

/// Symmetric square root factor of a covariance that may be singular or
/// carry round-off negative eigenvalues (clipped to zero).
[[nodiscard]] Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov);

}  // namespace roughldp
