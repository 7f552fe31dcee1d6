#include "roughldp/paths.hpp"

#include "roughldp/errors.hpp"
#include "roughldp/parallel.hpp"
#include "roughldp/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace roughldp {
namespace {

constexpr std::size_t kMaxRefinedNodes = 1024;

void require_paths(std::size_t n_paths) {
  if (n_paths == 0) throw std::invalid_argument("n_paths must be >= 1");
}

// Rows of `out` are L z for i.i.d. standard normal z, one engine per row.
void fill_correlated(const Eigen::MatrixXd& factor, std::uint64_t seed, Eigen::MatrixXd& out) {
  const Eigen::Index n = factor.rows();
  parallel_for(static_cast<std::size_t>(out.rows()), [&](std::size_t p) {
    auto rng = make_engine(seed, Stream::DrivingNoise, p);
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(n);
    for (Eigen::Index k = 0; k < n; ++k) z[k] = normal(rng);
    out.row(static_cast<Eigen::Index>(p)) = (factor.triangularView<Eigen::Lower>() * z).transpose();
  });
}

GaussianPathBatch product_rule_fou(double H, double beta, double xi, const TimeGrid& grid,
                                   std::size_t n_paths, std::uint64_t seed, std::size_t substeps) {
  const std::size_t n = grid.size();
  const std::size_t m = std::max<std::size_t>(1, std::min(substeps, kMaxRefinedNodes / n));
  std::vector<double> fine;
  fine.reserve(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = grid.cell_start(i);
    for (std::size_t k = 1; k < m; ++k) {
      fine.push_back(c + grid.weight(i) * static_cast<double>(k) / static_cast<double>(m));
    }
    fine.push_back(grid.node(i));
  }
  const TimeGrid fine_grid = TimeGrid::from_nodes(fine);
  const Eigen::MatrixXd factor = cholesky_factor(fbm_covariance_matrix(H, fine_grid), "sample_fou");

  GaussianPathBatch batch{grid, Eigen::MatrixXd(n_paths, n), seed, Construction::ProductRule};
  parallel_for(n_paths, [&](std::size_t p) {
    auto rng = make_engine(seed, Stream::DrivingNoise, p);
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(factor.rows());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
    const Eigen::VectorXd w = factor.triangularView<Eigen::Lower>() * z;
    // J_k = int_0^{t_k} W_u e^{beta (t_k - u)} du by the trapezoid rule.
    double j = 0.0;
    double w_prev = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      const double h = fine_grid.weight(k);
      const double decay = std::exp(beta * h);
      const double wk = w[static_cast<Eigen::Index>(k)];
      j = decay * j + 0.5 * h * (w_prev * decay + wk);
      w_prev = wk;
      if ((k + 1) % m == 0) {
        batch.values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k / m)) =
            xi * (wk + beta * j);
      }
    }
  });
  return batch;
}

}  // namespace

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::CovFactor: return "CovFactor";
    case Construction::KernelDriven: return "KernelDriven";
    case Construction::ProductRule: return "ProductRule";
  }
  return "?";
}

Construction construction_from_string(std::string_view name) {
  for (Construction c :
       {Construction::CovFactor, Construction::KernelDriven, Construction::ProductRule}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown construction '" + std::string(name) + "'");
}

double fbm_covariance(double H, double t, double s) {
  if (!(H > 0.0 && H < 1.0)) throw std::domain_error("fbm_covariance: H must lie in (0, 1)");
  const double h2 = 2.0 * H;
  return 0.5 * (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
}

Eigen::MatrixXd fbm_covariance_matrix(double H, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = fbm_covariance(H, grid.node(static_cast<std::size_t>(i)),
                                             grid.node(static_cast<std::size_t>(j)));
    }
  }
  return cov;
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& cov, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  const double pivot = ldlt.vectorD().minCoeff();
  throw ConvergenceError(std::string(what) +
                         ": covariance is not positive definite, smallest pivot " +
                         std::to_string(pivot));
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

GaussianPathBatch sample_fbm(double H, const TimeGrid& grid, std::size_t n_paths,
                             std::uint64_t seed) {
  require_paths(n_paths);
  const Eigen::MatrixXd factor = cholesky_factor(fbm_covariance_matrix(H, grid), "sample_fbm");
  GaussianPathBatch batch{grid, Eigen::MatrixXd(n_paths, grid.size()), seed,
                          Construction::CovFactor};
  fill_correlated(factor, seed, batch.values);
  return batch;
}

GaussianPathBatch sample_fou(double H, double beta, double xi, const TimeGrid& grid,
                             std::size_t n_paths, std::uint64_t seed, Construction construction,
                             FouOptions options) {
  require_paths(n_paths);
  if (!(xi >= 0.0)) throw std::invalid_argument("sample_fou: xi must be >= 0");
  if (xi == 0.0) {
    return {grid, Eigen::MatrixXd::Zero(n_paths, grid.size()), seed, construction};
  }
  switch (construction) {
    case Construction::ProductRule:
      return product_rule_fou(H, beta, xi, grid, n_paths, seed, options.substeps);
    case Construction::CovFactor: {
      const Eigen::MatrixXd factor =
          cholesky_factor(gram_matrix(KernelSpec::fou(H, beta, xi), grid), "sample_fou");
      GaussianPathBatch batch{grid, Eigen::MatrixXd(n_paths, grid.size()), seed, construction};
      fill_correlated(factor, seed, batch.values);
      return batch;
    }
    case Construction::KernelDriven: {
      const VolterraSampler sampler(KernelSpec::fou(H, beta, xi), grid);
      GaussianPathBatch batch{grid, Eigen::MatrixXd(n_paths, grid.size()), seed, construction};
      parallel_for(n_paths, [&](std::size_t p) {
        auto rng = make_engine(seed, Stream::DrivingNoise, p);
        std::vector<double> db(grid.size());
        std::vector<double> z(grid.size());
        sampler.sample(rng, db, z);
        for (std::size_t k = 0; k < z.size(); ++k) {
          batch.values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = z[k];
        }
      });
      return batch;
    }
  }
  throw std::invalid_argument("sample_fou: unknown construction");
}

VolterraSampler::VolterraSampler(const KernelSpec& spec, const TimeGrid& grid)
    : n_(grid.size()) {
  const auto n = static_cast<Eigen::Index>(n_);
  sqrt_dt_.resize(n);
  Eigen::VectorXd inv_dt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = grid.weight(static_cast<std::size_t>(i));
    sqrt_dt_[i] = std::sqrt(w);
    inv_dt[i] = 1.0 / w;
  }
  const Eigen::MatrixXd a = operator_matrix(spec, grid);
  projection_ = a * inv_dt.asDiagonal();
  const Eigen::MatrixXd schur = gram_matrix(spec, grid) - projection_ * a.transpose();
  residual_ = psd_factor(schur);
}

void VolterraSampler::sample(std::mt19937_64& rng, std::span<double> increments,
                             std::span<double> path) const {
  if (increments.size() != n_ || path.size() != n_) {
    throw std::invalid_argument("VolterraSampler: output spans must match the grid");
  }
  const auto n = static_cast<Eigen::Index>(n_);
  std::normal_distribution<double> normal;
  Eigen::VectorXd db(n);
  Eigen::VectorXd eta(n);
  for (Eigen::Index i = 0; i < n; ++i) db[i] = sqrt_dt_[i] * normal(rng);
  for (Eigen::Index i = 0; i < n; ++i) eta[i] = normal(rng);
  const Eigen::VectorXd z = projection_.triangularView<Eigen::Lower>() * db + residual_ * eta;
  for (Eigen::Index i = 0; i < n; ++i) {
    increments[static_cast<std::size_t>(i)] = db[i];
    path[static_cast<std::size_t>(i)] = z[i];
  }
}

}  // namespace roughldp
