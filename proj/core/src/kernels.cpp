#include "roughldp/kernels.hpp"

#include "roughldp/errors.hpp"
#include "roughldp/parallel.hpp"
#include "roughldp/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace roughldp {
namespace {

constexpr double kInnerTol = 1e-11;
constexpr double kInnerAccept = 1e-8;
constexpr double kCellTol = 1e-9;
constexpr double kCellAccept = 1e-6;

bool is_brownian(const HurstParams& h) { return h.minus == 0.0; }

// int_0^wmax w^a h(1 + w, w) dw with h smooth. The inner u-integrals of the
// kernels are written in x = u / s, w = x - 1, which keeps every factor in
// range however small s is. The stretch w <= 1 carries the endpoint
// singularity; beyond it the integrand is smooth in v = log x.
template <class Hf>
quad::Estimate scaled_integral(Hf&& h, double a, double wmax) {
  if (wmax <= 1e-9) {
    // h is constant to relative order wmax over the whole range.
    return {h(1.0 + 0.5 * wmax, 0.5 * wmax) * std::pow(wmax, a + 1.0) / (a + 1.0), 0.0};
  }
  // For a close to -1 the rule cannot resolve w^a, so the endpoint value is
  // integrated exactly and only the O(w^{a+1}) remainder goes to quadrature.
  const double near_len = std::min(wmax, 1.0);
  const double h0 = h(1.0, 0.0);
  auto near = [&](double, double w, double) { return std::pow(w, a) * (h(1.0 + w, w) - h0); };
  quad::Estimate total = quad::weakly_singular(near, 0.0, near_len, kInnerTol);
  total.value += h0 * std::pow(near_len, a + 1.0) / (a + 1.0);
  if (wmax > 1.0) {
    auto far = [&](double v, double, double) {
      const double x = std::exp(v);
      return std::pow(x - 1.0, a) * h(x, x - 1.0) * x;
    };
    const double lo = std::log(2.0);
    const quad::Estimate rest =
        quad::weakly_singular(far, lo, std::log1p(wmax) - lo, kInnerTol);
    total.value += rest.value;
    total.error += rest.error;
  }
  return total;
}

void accept_inner(double error, double scale, double value, const char* what) {
  if (!std::isfinite(value) || error > kInnerAccept * scale) {
    throw ConvergenceError(std::string(what) + ": inner quadrature error " +
                           std::to_string(error) + " above tolerance");
  }
}

// K^H(t, s), H != 1/2.
double fbm_kernel(const HurstParams& h, double t, double s, double gap) {
  const double hm = h.minus;
  if (hm < 0.0) {
    // s^{-hm} [ (t (t - s))^{hm} - hm int_s^t (u - s)^{hm} u^{hm - 1} du ]
    const double first = std::pow(s, -hm) * std::pow(t, hm) * std::pow(gap, hm);
    auto g = [&](double x, double) { return std::pow(x, hm - 1.0); };
    const quad::Estimate j = scaled_integral(g, hm, gap / s);
    const double ps = std::pow(s, hm);
    const double tail = -hm * ps * j.value;
    const double value = first + tail;
    accept_inner(-hm * ps * j.error, value, value, "K_fbm");
    return h.kappa * value;
  }
  // hm s^{-hm} int_s^t u^{hm} (u - s)^{hm - 1} du
  auto g = [&](double x, double) { return std::pow(x, hm); };
  const quad::Estimate j = scaled_integral(g, hm - 1.0, gap / s);
  accept_inner(j.error, std::abs(j.value), j.value, "K_fbm");
  return h.kappa * hm * std::pow(s, hm) * j.value;
}

// F^H(t, s) / xi with mean reversion beta != 0, H != 1/2.
double fou_kernel(const HurstParams& h, double beta, double t, double s, double gap) {
  const double hm = h.minus;
  if (hm < 0.0) {
    // s^{-hm} [ (t (t - s))^{hm}
    //   + int_s^t {(1 - 2H) / (2u) + beta} (u (u - s))^{hm} e^{beta (t - u)} du ]
    const double first = std::pow(s, -hm) * std::pow(t, hm) * std::pow(gap, hm);
    const double c = -hm;
    auto g = [&](double x, double w) {
      return std::pow(x, hm - 1.0) * (c + beta * s * x) * std::exp(beta * (gap - s * w));
    };
    const quad::Estimate j = scaled_integral(g, hm, gap / s);
    const double ps = std::pow(s, hm);
    const double value = first + ps * j.value;
    accept_inner(ps * j.error, first + ps * std::abs(j.value), value, "F_fou");
    return h.kappa * value;
  }
  // hm s^{-hm} int_s^t u^{hm} (u - s)^{hm - 1} e^{beta (t - u)} du
  auto g = [&](double x, double w) { return std::pow(x, hm) * std::exp(beta * (gap - s * w)); };
  const quad::Estimate j = scaled_integral(g, hm - 1.0, gap / s);
  accept_inner(j.error, std::abs(j.value), j.value, "F_fou");
  return h.kappa * hm * std::pow(s, hm) * j.value;
}

// True when the kernel is one of the elementary closed forms.
bool closed_form(const KernelSpec& spec) {
  return spec.kind == KernelKind::Identity || is_brownian(spec.hurst);
}

// Closed-form kernel value; only valid when closed_form(spec).
double closed_value(const KernelSpec& spec, double gap) {
  switch (spec.kind) {
    case KernelKind::Identity:
    case KernelKind::Fbm:
      return 1.0;
    case KernelKind::SmallTimeLimit:
      return spec.xi;
    case KernelKind::FractionalOU:
    case KernelKind::SmallTimeEps: {
      const double b = spec.effective_beta();
      return b == 0.0 ? spec.xi : spec.xi * std::exp(b * gap);
    }
  }
  return 0.0;
}

// int_c^d Phi(t, s) ds for a closed-form kernel, with t - d = lag.
double closed_cell(const KernelSpec& spec, double c, double d, double lag) {
  const double width = d - c;
  const bool exponential =
      spec.kind == KernelKind::FractionalOU || spec.kind == KernelKind::SmallTimeEps;
  if (exponential && spec.effective_beta() != 0.0) {
    const double b = spec.effective_beta();
    return spec.xi * std::exp(b * lag) * std::expm1(b * width) / b;
  }
  return closed_value(spec, 1.0) * width;
}

// int_0^m Phi(ti, r) Phi(tj, r) dr for a closed-form kernel, ti, tj >= m.
double closed_gram(const KernelSpec& spec, double ti, double tj, double m) {
  const bool exponential =
      spec.kind == KernelKind::FractionalOU || spec.kind == KernelKind::SmallTimeEps;
  if (exponential && spec.effective_beta() != 0.0) {
    const double b = spec.effective_beta();
    return spec.xi * spec.xi * std::exp(b * (ti + tj - 2.0 * m)) * std::expm1(2.0 * b * m) /
           (2.0 * b);
  }
  const double v = closed_value(spec, 1.0);
  return v * v * m;
}

// Outer integrands drop r below this fraction of the range. The neglected
// piece is O(cutoff^(1 - 2|H - 1/2|)) and the kernels would overflow there.
constexpr double kOriginCutoff = 1e-60;

void accept_cell(const quad::Estimate& e, const char* what) {
  if (!std::isfinite(e.value) || e.error > kCellAccept * std::abs(e.value) + 1e-14) {
    throw ConvergenceError(std::string(what) + ": cell quadrature error " +
                           std::to_string(e.error) + " above tolerance");
  }
}

}  // namespace

HurstParams HurstParams::from(double H) {
  if (!(H > 0.0 && H < 1.0)) {
    throw std::domain_error("Hurst parameter must lie in (0, 1), got " + std::to_string(H));
  }
  HurstParams h;
  h.H = H;
  h.minus = H - 0.5;
  h.plus = H + 0.5;
  h.kappa = roughldp::kappa(H);
  return h;
}

double kappa(double H) {
  if (!(H > 0.0 && H < 1.0)) {
    throw std::domain_error("Hurst parameter must lie in (0, 1), got " + std::to_string(H));
  }
  const double hm = H - 0.5;
  const double hp = H + 0.5;
  return std::sqrt(2.0 * H * std::tgamma(1.0 - hm) / (std::tgamma(hp) * std::tgamma(2.0 - 2.0 * H)));
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Fbm: return "K_fbm";
    case KernelKind::FractionalOU: return "F_fou";
    case KernelKind::SmallTimeEps: return "G_eps";
    case KernelKind::SmallTimeLimit: return "G_zero";
    case KernelKind::Identity: return "Identity";
  }
  return "?";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  for (KernelKind k : {KernelKind::Fbm, KernelKind::FractionalOU, KernelKind::SmallTimeEps,
                       KernelKind::SmallTimeLimit, KernelKind::Identity}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

KernelSpec KernelSpec::fbm(double H) { return {KernelKind::Fbm, HurstParams::from(H), 0.0, 1.0, 0.0}; }

KernelSpec KernelSpec::fou(double H, double beta, double xi) {
  KernelSpec s{KernelKind::FractionalOU, HurstParams::from(H), beta, xi, 0.0};
  s.validate();
  return s;
}

KernelSpec KernelSpec::small_time(double H, double beta, double xi, double eps) {
  KernelSpec s{KernelKind::SmallTimeEps, HurstParams::from(H), beta, xi, eps};
  s.validate();
  return s;
}

KernelSpec KernelSpec::small_time_limit(double H, double xi) {
  KernelSpec s{KernelKind::SmallTimeLimit, HurstParams::from(H), 0.0, xi, 0.0};
  s.validate();
  return s;
}

KernelSpec KernelSpec::identity() { return {}; }

double KernelSpec::effective_beta() const {
  switch (kind) {
    case KernelKind::FractionalOU: return beta;
    case KernelKind::SmallTimeEps: return beta * eps * eps;
    default: return 0.0;
  }
}

double KernelSpec::origin_exponent() const {
  if (closed_form(*this)) return 0.0;
  return -std::abs(hurst.minus);
}

double KernelSpec::diagonal_exponent() const {
  if (closed_form(*this)) return 0.0;
  return hurst.minus;
}

void KernelSpec::validate() const {
  if (!(hurst.H > 0.0 && hurst.H < 1.0)) throw std::domain_error("kernel: H must lie in (0, 1)");
  const bool uses_xi = kind != KernelKind::Fbm && kind != KernelKind::Identity;
  if (uses_xi && !(xi > 0.0)) throw std::invalid_argument("kernel: xi must be > 0");
  if (!std::isfinite(beta)) throw std::invalid_argument("kernel: beta must be finite");
  if (!(eps >= 0.0)) throw std::invalid_argument("kernel: eps must be >= 0");
}

double eval_kernel(const KernelSpec& spec, double t, double s) {
  if (!(s > 0.0) || !(s < t) || t > 1.0) {
    throw std::domain_error("eval_kernel needs 0 < s < t <= 1, got t=" + std::to_string(t) +
                            " s=" + std::to_string(s));
  }
  return eval_kernel_gap(spec, t, s, t - s);
}

double eval_kernel_gap(const KernelSpec& spec, double t, double s, double gap) {
  if (!(s > 0.0) || !(gap > 0.0)) throw std::domain_error("eval_kernel needs 0 < s < t");
  if (closed_form(spec)) return closed_value(spec, gap);
  switch (spec.kind) {
    case KernelKind::Fbm:
      return fbm_kernel(spec.hurst, t, s, gap);
    case KernelKind::SmallTimeLimit:
      return spec.xi * fbm_kernel(spec.hurst, t, s, gap);
    case KernelKind::FractionalOU:
    case KernelKind::SmallTimeEps: {
      const double b = spec.effective_beta();
      if (b == 0.0) return spec.xi * fbm_kernel(spec.hurst, t, s, gap);
      return spec.xi * fou_kernel(spec.hurst, b, t, s, gap);
    }
    case KernelKind::Identity:
      break;
  }
  return 1.0;
}

Eigen::MatrixXd operator_matrix(const KernelSpec& spec, const TimeGrid& grid) {
  spec.validate();
  const std::size_t n = grid.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const bool exact = closed_form(spec);
  parallel_for(n, [&](std::size_t i) {
    const double ti = grid.node(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double c = grid.cell_start(j);
      const double d = grid.node(j);
      const double lag = i == j ? 0.0 : ti - d;
      double v;
      if (exact) {
        v = closed_cell(spec, c, d, lag);
      } else {
        auto f = [&](double s, double, double d_hi) {
          if (s < kOriginCutoff * ti) return 0.0;
          return eval_kernel_gap(spec, ti, s, lag + d_hi);
        };
        quad::Estimate e;
        if (j > 0 && j + 1 < i) {
          auto smooth_f = [&](double s) { return eval_kernel_gap(spec, ti, s, ti - s); };
          e = quad::smooth(smooth_f, c, d, kCellTol);
        } else {
          e = quad::weakly_singular(f, c, d - c, kCellTol);
        }
        accept_cell(e, "operator_matrix");
        v = e.value;
      }
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  });
  return a;
}

std::vector<double> apply_operator(const KernelSpec& spec, std::span<const double> f,
                                   const TimeGrid& grid) {
  require_grid_size(grid, f.size(), "apply_operator");
  const Eigen::MatrixXd a = operator_matrix(spec, grid);
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXd y = a.triangularView<Eigen::Lower>() * fv;
  return {y.data(), y.data() + y.size()};
}

double l2_energy(std::span<const double> f, std::span<const double> g, const TimeGrid& grid) {
  require_grid_size(grid, f.size(), "l2_energy f");
  require_grid_size(grid, g.size(), "l2_energy g");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += (f[i] * f[i] + g[i] * g[i]) * grid.weight(i);
  return 0.5 * sum;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const TimeGrid& grid) {
  spec.validate();
  const std::size_t n = grid.size();
  Eigen::MatrixXd gm(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const bool exact = closed_form(spec);
  parallel_for(n, [&](std::size_t i) {
    const double ti = grid.node(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double m = grid.node(j);
      double v;
      if (exact) {
        v = closed_gram(spec, ti, m, m);
      } else {
        const double lag = ti - m;
        auto f = [&](double r, double, double d_hi) {
          if (r < kOriginCutoff * m) return 0.0;
          const double kj = eval_kernel_gap(spec, m, r, d_hi);
          return (i == j ? kj : eval_kernel_gap(spec, ti, r, lag + d_hi)) * kj;
        };
        const quad::Estimate e = quad::weakly_singular(f, 0.0, m, kCellTol);
        accept_cell(e, "gram_matrix");
        v = e.value;
      }
      gm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      gm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  });
  return gm;
}

}  // namespace roughldp
