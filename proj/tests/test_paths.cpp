#include "doctest.h"

#include "roughldp/kernels.hpp"
#include "roughldp/parallel.hpp"
#include "roughldp/paths.hpp"

#include <cmath>

using namespace roughldp;

namespace {

struct Moments {
  Eigen::MatrixXd cov;
  Eigen::MatrixXd se;
};

Moments moments(const Eigen::MatrixXd& x) {
  const auto n = static_cast<double>(x.rows());
  const Eigen::Index m = x.cols();
  Moments out{Eigen::MatrixXd(m, m), Eigen::MatrixXd(m, m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::ArrayXd p = x.col(i).array() * x.col(j).array();
      out.cov(i, j) = p.mean();
      out.se(i, j) = std::sqrt((p - p.mean()).square().sum() / (n - 1.0) / n);
    }
  }
  return out;
}

double max_z(const Moments& m, const Eigen::MatrixXd& ref) {
  return ((m.cov - ref).array().abs() / m.se.array()).maxCoeff();
}

}  // namespace

TEST_CASE("fbm covariance") {
  CHECK(fbm_covariance(0.5, 0.3, 0.8) == doctest::Approx(0.3));
  CHECK(fbm_covariance(0.3, 0.5, 0.5) == doctest::Approx(std::pow(0.5, 0.6)));
  CHECK(fbm_covariance(0.7, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS((void)fbm_covariance(1.2, 0.5, 0.5), std::domain_error);
}

TEST_CASE("sample_fbm matches the covariance") {
  const TimeGrid g = TimeGrid::uniform(6);
  const GaussianPathBatch b = sample_fbm(0.5, g, 100000, 17);
  CHECK(max_z(moments(b.values), fbm_covariance_matrix(0.5, g)) <= 3.5);
  const GaussianPathBatch r = sample_fbm(0.3, g, 100000, 18);
  const Moments m = moments(r.values);
  for (Eigen::Index i = 0; i < 6; ++i) {
    CHECK(std::abs(m.cov(i, i) - std::pow(g.node(static_cast<std::size_t>(i)), 0.6)) <= 3.5 * m.se(i, i));
    const Eigen::ArrayXd col = r.values.col(i).array();
    const double sd = std::sqrt((col - col.mean()).square().mean());
    CHECK(std::abs(col.mean()) <= 3.5 * sd / std::sqrt(100000.0));
  }
}

TEST_CASE("sample_fbm determinism and thread independence") {
  const TimeGrid g = TimeGrid::uniform(8);
  const GaussianPathBatch a = sample_fbm(0.3, g, 1, 99);
  const GaussianPathBatch b = sample_fbm(0.3, g, 1, 99);
  CHECK(a.values == b.values);
  const std::size_t before = thread_count();
  set_thread_count(1);
  const GaussianPathBatch one = sample_fou(0.3, -1.0, 1.0, g, 500, 5, Construction::KernelDriven);
  set_thread_count(3);
  const GaussianPathBatch three = sample_fou(0.3, -1.0, 1.0, g, 500, 5, Construction::KernelDriven);
  set_thread_count(before);
  CHECK(one.values == three.values);
}

TEST_CASE("fbm covariance error shrinks like 1/sqrt(n)") {
  const TimeGrid g = TimeGrid::uniform(4);
  const Eigen::MatrixXd ref = fbm_covariance_matrix(0.3, g);
  // Average over several seeds to stabilize the ratio.
  double small = 0.0;
  double large = 0.0;
  for (std::uint64_t s = 0; s < 6; ++s) {
    small += (moments(sample_fbm(0.3, g, 1000, 100 + s).values).cov - ref).norm();
    large += (moments(sample_fbm(0.3, g, 100000, 200 + s).values).cov - ref).norm();
  }
  const double ratio = small / large;
  CHECK(ratio >= 5.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("fOU constructions") {
  const TimeGrid g = TimeGrid::uniform(8);
  const GaussianPathBatch zero = sample_fou(0.3, -1.0, 0.0, g, 10, 1, Construction::ProductRule);
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  // OU closed form at H = 1/2 for every construction.
  const Eigen::MatrixXd ou = gram_matrix(KernelSpec::fou(0.5, -1.0, 1.0), g);
  for (Construction c : {Construction::CovFactor, Construction::KernelDriven, Construction::ProductRule}) {
    const GaussianPathBatch b = sample_fou(0.5, -1.0, 1.0, g, 100000, 41, c);
    CHECK(b.construction == c);
    CHECK(max_z(moments(b.values), ou) <= 3.5);
  }
  const GaussianPathBatch a = sample_fou(0.7, -1.0, 1.0, g, 50, 8, Construction::ProductRule);
  const GaussianPathBatch b = sample_fou(0.7, -1.0, 1.0, g, 50, 8, Construction::ProductRule);
  CHECK(a.values == b.values);
  CHECK(construction_from_string("KernelDriven") == Construction::KernelDriven);
}

TEST_CASE("Volterra sampler has the exact joint law") {
  const TimeGrid g = TimeGrid::uniform(6);
  const KernelSpec spec = KernelSpec::fou(0.3, -1.0, 1.0);
  const VolterraSampler sampler(spec, g);
  const Eigen::MatrixXd a = operator_matrix(spec, g);
  const Eigen::MatrixXd gram = gram_matrix(spec, g);
  // Cov(Z, dB) = A and Cov(Z) = gram by construction.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i) d(i, i) = g.weight(static_cast<std::size_t>(i));
  const Eigen::MatrixXd cross = sampler.projection() * d;
  CHECK((cross - a).cwiseAbs().maxCoeff() <= 1e-12);
  const Eigen::MatrixXd cov = sampler.projection() * d * sampler.projection().transpose() +
                              sampler.residual_factor() * sampler.residual_factor().transpose();
  CHECK((cov - gram).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("cholesky failure names the pivot") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS((void)cholesky_factor(bad, "test"), std::runtime_error);
  const Eigen::MatrixXd f = psd_factor(bad);
  CHECK(f.allFinite());
}
