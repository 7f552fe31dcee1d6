#include "roughldp/rates.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace roughldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Satisfies {
  ConstraintSense sense;
  double level;
  bool operator()(double x) const {
    switch (sense) {
      case ConstraintSense::AtLeast: return x >= level;
      case ConstraintSense::AtMost: return x <= level;
      case ConstraintSense::Equal: break;
    }
    return x == level;
  }
};

class AugmentedLagrangian final : public ceres::FirstOrderFunction {
 public:
  AugmentedLagrangian(const RateModel& model, double u, double level, double mu, double penalty)
      : model_(model), u_(u), level_(level), mu_(mu), penalty_(penalty) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const Eigen::Map<const Eigen::VectorXd> v(parameters, NumParameters());
    if (gradient == nullptr) {
      *cost = model_.penalized(v, u_, level_, mu_, penalty_);
    } else {
      Eigen::VectorXd g;
      *cost = model_.penalized(v, u_, level_, mu_, penalty_, &g);
      Eigen::Map<Eigen::VectorXd>(gradient, NumParameters()) = g;
    }
    return std::isfinite(*cost);
  }
  int NumParameters() const override { return static_cast<int>(2 * model_.size()); }

 private:
  const RateModel& model_;
  double u_, level_, mu_, penalty_;
};

struct LocalSolution {
  Eigen::VectorXd v;
  double violation = kInf;
  double kkt = kInf;
  std::size_t iterations = 0;
};

// Augmented-Lagrangian loop for x_T(v) = level at fixed u.
LocalSolution solve_equality(const RateModel& model, double u, double level, Eigen::VectorXd v,
                             const SolverOptions& options) {
  constexpr double kTarget = 1e-11;
  LocalSolution out;
  Eigen::VectorXd grad;
  double c = model.terminal(v, u, &grad) - level;
  const double g2 = grad.squaredNorm();
  double mu = g2 > 0.0 ? v.dot(grad) / g2 : 0.0;
  double penalty = 10.0;
  double previous = std::abs(c);

  ceres::GradientProblemSolver::Options opts;
  opts.line_search_direction_type = ceres::BFGS;
  opts.max_num_iterations = static_cast<int>(options.max_inner);
  opts.logging_type = ceres::SILENT;
  opts.minimizer_progress_to_stdout = false;
  opts.function_tolerance = 1e-16;
  opts.gradient_tolerance = 1e-13;
  opts.parameter_tolerance = 1e-16;

  for (std::size_t outer = 0; outer < options.max_outer; ++outer) {
    ceres::GradientProblem problem(new AugmentedLagrangian(model, u, level, mu, penalty));
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(opts, problem, v.data(), &summary);
    out.iterations += static_cast<std::size_t>(summary.iterations.size());

    c = model.terminal(v, u, &grad) - level;
    if (!std::isfinite(c)) break;
    mu -= penalty * c;
    out.v = v;
    out.violation = std::abs(c);
    out.kkt = (v - mu * grad).norm() / std::max(1.0, v.norm());
    if (out.violation <= kTarget && out.kkt <= options.kkt_tol) break;
    if (std::abs(c) > 0.25 * previous) penalty = std::min(penalty * 10.0, 1e12);
    previous = std::abs(c);
  }
  return out;
}

// Smallest a in (0, a_max] with c(a) = 0, where c(0) != 0; NaN when none.
double first_root(const std::function<double(double)>& c, double a_max, std::size_t scan) {
  double lo = 0.0;
  double c_lo = c(0.0);
  if (c_lo == 0.0) return 0.0;
  for (std::size_t i = 1; i <= scan; ++i) {
    const double a = a_max * std::pow(static_cast<double>(i) / static_cast<double>(scan), 2.0);
    const double c_a = c(a);
    if (!std::isfinite(c_a)) return std::nan("");
    if (c_a == 0.0) return a;
    if ((c_a > 0.0) != (c_lo > 0.0)) {
      std::uintmax_t iters = 200;
      const auto [x0, x1] = boost::math::tools::toms748_solve(
          c, lo, a, c_lo, c_a, boost::math::tools::eps_tolerance<double>(52), iters);
      return 0.5 * (x0 + x1);
    }
    lo = a;
    c_lo = c_a;
  }
  return std::nan("");
}

// Constant-pattern starting directions in (f, g).
constexpr std::array<std::array<double, 2>, 6> kPatterns{{
    {1.0, 1.0}, {1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}}};

Eigen::VectorXd pattern_direction(const RateModel& model, const std::array<double, 2>& p) {
  const std::size_t n = model.size();
  ControlVector c{std::vector<double>(n, p[0]), std::vector<double>(n, p[1])};
  return model.to_scaled(c);
}

RateResult finish(const RateModel& model, const Eigen::VectorXd& v, double u, double level,
                  const LocalSolution* local, const SolverOptions& options) {
  const VariationalProblem& problem = model.problem();
  RateResult r;
  r.controls = model.from_scaled(v);
  r.value = l2_energy(r.controls.f, r.controls.g, problem.grid);
  PathPair p = model.paths(r.controls, u);
  r.y_path = std::move(p.y);
  r.x_path = std::move(p.x);
  r.start_used = u;
  r.level_used = level;
  r.n_grid = problem.grid.size();
  if (local != nullptr) {
    r.iterations = local->iterations;
    r.kkt_residual = local->kkt;
    r.converged = local->violation <= options.feasibility_tol && local->kkt <= options.kkt_tol;
  } else {
    r.kkt_residual = 0.0;
    r.converged = true;
  }
  r.status = r.converged ? RateStatus::Converged : RateStatus::NotConverged;
  return r;
}

RateResult infeasible(const VariationalProblem& problem, double u, double level) {
  RateResult r;
  r.value = kInf;
  r.start_used = u;
  r.level_used = level;
  r.n_grid = problem.grid.size();
  r.status = RateStatus::Infeasible;
  r.kkt_residual = kInf;
  return r;
}

// Minimum energy with x_T = level at fixed u over the multistart set.
RateResult solve_level(const RateModel& model, double u, double level,
                       const SolverOptions& options) {
  const std::size_t dim = 2 * model.size();
  std::vector<Eigen::VectorXd> starts;
  starts.emplace_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
  const std::size_t patterns = std::min(kPatterns.size(), std::max<std::size_t>(options.multistart, 1) - 1);
  for (std::size_t i = 0; i < patterns; ++i) {
    const Eigen::VectorXd d = pattern_direction(model, kPatterns[i]);
    auto c = [&](double a) { return model.terminal(a * d, u) - level; };
    const double a = first_root(c, 1e3, 400);
    if (std::isfinite(a)) starts.emplace_back(a * d);
  }

  const RateResult none = infeasible(model.problem(), u, level);
  RateResult best = none;
  bool any_feasible = false;
  for (const Eigen::VectorXd& start : starts) {
    const LocalSolution local = solve_equality(model, u, level, start, options);
    if (local.v.size() == 0 || !(local.violation <= options.feasibility_tol)) continue;
    RateResult r = finish(model, local.v, u, level, &local, options);
    if (!any_feasible || r.value < best.value) {
      best = std::move(r);
      any_feasible = true;
    }
  }
  return any_feasible ? best : none;
}

// Fixed-u solve, including the inequality scan.
RateResult solve_fixed(const RateModel& model, double u, const SolverOptions& options) {
  const VariationalProblem& problem = model.problem();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * model.size()));
  if (problem.sense == ConstraintSense::Equal) return solve_level(model, u, problem.level, options);

  const double x0 = model.terminal(zero, u);
  if (Satisfies{problem.sense, problem.level}(x0)) return finish(model, zero, u, x0, nullptr, options);

  RateResult best = infeasible(problem, u, problem.level);
  double previous = kInf;
  const std::size_t count = std::max<std::size_t>(options.level_count, 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    double level = problem.level * std::pow(options.level_span, frac);
    if (problem.level == 0.0) level = x0 > 0.0 ? -frac : frac;
    RateResult r = solve_level(model, u, level, options);
    if (r.status != RateStatus::Infeasible && r.value < best.value) best = r;
    if (r.status != RateStatus::Infeasible && r.value > previous) break;
    if (r.status != RateStatus::Infeasible) previous = r.value;
  }
  return best;
}

}  // namespace

std::string_view to_string(ConstraintSense sense) {
  switch (sense) {
    case ConstraintSense::Equal: return "eq";
    case ConstraintSense::AtLeast: return "ge";
    case ConstraintSense::AtMost: return "le";
  }
  return "?";
}

std::string_view to_string(RateStatus status) {
  switch (status) {
    case RateStatus::Converged: return "converged";
    case RateStatus::NotConverged: return "not_converged";
    case RateStatus::Infeasible: return "infeasible";
  }
  return "?";
}

StartSpec StartSpec::fixed(double u, StartShape shape, double beta) { return {u, u, shape, beta}; }

StartSpec StartSpec::interval(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("start interval needs lo <= hi");
  return {lo, hi, StartShape::Constant, 0.0};
}

double StartSpec::weight(double t) const {
  return shape == StartShape::Exponential ? std::exp(beta * t) : 1.0;
}

std::size_t VariationalProblem::terminal() const {
  return terminal_node.value_or(grid.size() - 1);
}

double VariationalProblem::rho_bar() const { return std::sqrt(std::max(0.0, 1.0 - rho * rho)); }

void VariationalProblem::validate() const {
  if (grid.size() == 0) throw std::invalid_argument("problem grid is empty");
  if (terminal() >= grid.size()) throw std::invalid_argument("terminal node outside the grid");
  if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
  if (!(start.lo <= start.hi)) throw std::invalid_argument("start interval needs lo <= hi");
  if (!std::isfinite(level)) throw std::invalid_argument("level must be finite");
  if (kernel.kind != KernelKind::Identity) kernel.validate();
}

RateModel::RateModel(const VariationalProblem& problem)
    : problem_(problem), n_(problem.grid.size()) {
  problem_.validate();
  a_ = roughldp::operator_matrix(problem_.kernel, problem_.grid);
  w_ = Eigen::Map<const Eigen::VectorXd>(problem_.grid.weights().data(),
                                         static_cast<Eigen::Index>(n_));
  sqrt_w_ = w_.cwiseSqrt();
}

Eigen::VectorXd RateModel::to_scaled(const ControlVector& c) const {
  require_grid_size(problem_.grid, c.f.size(), "f");
  require_grid_size(problem_.grid, c.g.size(), "g");
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::VectorXd v(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = sqrt_w_[i] * c.f[static_cast<std::size_t>(i)];
    v[n + i] = sqrt_w_[i] * c.g[static_cast<std::size_t>(i)];
  }
  return v;
}

ControlVector RateModel::from_scaled(const Eigen::VectorXd& v) const {
  const auto n = static_cast<Eigen::Index>(n_);
  ControlVector c{std::vector<double>(n_), std::vector<double>(n_)};
  for (Eigen::Index i = 0; i < n; ++i) {
    c.f[static_cast<std::size_t>(i)] = v[i] / sqrt_w_[i];
    c.g[static_cast<std::size_t>(i)] = v[n + i] / sqrt_w_[i];
  }
  return c;
}

PathPair RateModel::paths(const ControlVector& c, double u) const {
  require_grid_size(problem_.grid, c.f.size(), "f");
  require_grid_size(problem_.grid, c.g.size(), "g");
  const auto n = static_cast<Eigen::Index>(n_);
  const Eigen::Map<const Eigen::VectorXd> f(c.f.data(), n);
  const Eigen::VectorXd kf = a_ * f;
  const double drift = problem_.include_drift ? -0.5 : 0.0;
  const double rb = problem_.rho_bar();
  PathPair out{std::vector<double>(n_), std::vector<double>(n_)};
  double y_prev = u * problem_.start.weight(0.0);
  double x = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    const double y = u * problem_.start.weight(problem_.grid.node(j)) + kf[static_cast<Eigen::Index>(j)];
    const double s = problem_.vol.sigma_tilde(0.5 * (y_prev + y));
    x += problem_.grid.weight(j) * (drift * s * s + s * (problem_.rho * c.f[j] + rb * c.g[j]));
    out.y[j] = y;
    out.x[j] = x;
    y_prev = y;
  }
  return out;
}

double RateModel::terminal(const Eigen::VectorXd& v, double u, Eigen::VectorXd* grad_v,
                           double* grad_u) const {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto last = static_cast<Eigen::Index>(problem_.terminal());
  const Eigen::VectorXd f = v.head(n).cwiseQuotient(sqrt_w_);
  const Eigen::VectorXd g = v.tail(n).cwiseQuotient(sqrt_w_);
  const Eigen::VectorXd kf = a_.topRows(last + 1) * f;
  const double drift = problem_.include_drift ? -0.5 : 0.0;
  const double rho = problem_.rho;
  const double rb = problem_.rho_bar();
  const ScalarFn& sig = problem_.vol.sigma_tilde;

  // chain(j) = dx / d ybar_j
  Eigen::VectorXd chain = Eigen::VectorXd::Zero(last + 1);
  Eigen::VectorXd s_vals(last + 1);
  std::vector<double> ybar_weight(static_cast<std::size_t>(last) + 1);
  double x = 0.0;
  double w_prev = problem_.start.weight(0.0);
  double y_prev = u * w_prev;
  for (Eigen::Index j = 0; j <= last; ++j) {
    const double wt = problem_.start.weight(problem_.grid.node(static_cast<std::size_t>(j)));
    const double y = u * wt + kf[j];
    const double ybar = 0.5 * (y_prev + y);
    const double s = sig(ybar);
    const double m = rho * f[j] + rb * g[j];
    const double dt = w_[j];
    x += dt * (drift * s * s + s * m);
    s_vals[j] = s;
    chain[j] = dt * (2.0 * drift * s + m) * sig.derivative(ybar);
    ybar_weight[static_cast<std::size_t>(j)] = 0.5 * (w_prev + wt);
    y_prev = y;
    w_prev = wt;
  }

  if (grad_v != nullptr) {
    Eigen::VectorXd df = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd dg = Eigen::VectorXd::Zero(n);
    // d ybar_j / d f = (A_{j-1} + A_j) / 2 with A_{-1} = 0.
    Eigen::VectorXd mid = chain;
    for (Eigen::Index j = 0; j < last; ++j) mid[j] += chain[j + 1];
    mid *= 0.5;
    df.head(last + 1) = a_.topLeftCorner(last + 1, last + 1).transpose() * mid;
    for (Eigen::Index j = 0; j <= last; ++j) {
      df[j] += w_[j] * rho * s_vals[j];
      dg[j] = w_[j] * rb * s_vals[j];
    }
    grad_v->resize(2 * n);
    grad_v->head(n) = df.cwiseQuotient(sqrt_w_);
    grad_v->tail(n) = dg.cwiseQuotient(sqrt_w_);
  }
  if (grad_u != nullptr) {
    double du = 0.0;
    for (Eigen::Index j = 0; j <= last; ++j) du += chain[j] * ybar_weight[static_cast<std::size_t>(j)];
    *grad_u = du;
  }
  return x;
}

double RateModel::penalized(const Eigen::VectorXd& v, double u, double level, double mu,
                            double penalty, Eigen::VectorXd* grad) const {
  const double c = terminal(v, u, grad) - level;
  if (grad != nullptr) *grad = v + (penalty * c - mu) * (*grad);
  return 0.5 * v.squaredNorm() - mu * c + 0.5 * penalty * c * c;
}

PathPair path_from_controls(const VariationalProblem& problem, const ControlVector& controls,
                            std::optional<double> u) {
  const RateModel model(problem);
  return model.paths(controls, u.value_or(problem.start.lo));
}

RateResult solve(const VariationalProblem& problem, const SolverOptions& options) {
  const RateModel model(problem);
  if (problem.start.is_fixed()) return solve_fixed(model, problem.start.lo, options);

  const double lo = problem.start.lo;
  const double hi = problem.start.hi;
  const std::size_t samples = std::max<std::size_t>(options.start_samples, 2);
  std::vector<RateResult> sampled;
  sampled.reserve(samples);
  std::size_t arg = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    sampled.push_back(solve_fixed(model, u, options));
    if (sampled[i].value < sampled[arg].value) arg = i;
  }
  RateResult best = sampled[arg];
  if (!std::isfinite(best.value)) return best;

  const double step = (hi - lo) / static_cast<double>(samples - 1);
  const double a = std::max(lo, best.start_used - step);
  const double b = std::min(hi, best.start_used + step);
  std::uintmax_t iters = 40;
  auto value_at = [&](double u) { return solve_fixed(model, u, options).value; };
  const auto [u_star, v_star] = boost::math::tools::brent_find_minima(value_at, a, b, 30, iters);
  if (v_star < best.value) best = solve_fixed(model, u_star, options);
  return best;
}

double brute_force_rate(const VariationalProblem& problem, std::size_t coarse_n) {
  if (coarse_n == 0 || coarse_n > 8) throw std::invalid_argument("brute_force_rate needs 1 <= coarse_n <= 8");
  VariationalProblem coarse = problem;
  coarse.grid = TimeGrid::uniform(coarse_n);
  coarse.terminal_node.reset();
  const RateModel model(coarse);
  const auto dim = static_cast<Eigen::Index>(2 * coarse_n);
  const Satisfies ok{coarse.sense, coarse.level};

  auto for_start = [&](double u) {
    if (ok(model.terminal(Eigen::VectorXd::Zero(dim), u))) return 0.0;
    auto crossing = [&](const Eigen::VectorXd& d, double a_max) {
      auto c = [&](double a) { return model.terminal(a * d, u) - coarse.level; };
      return first_root(c, a_max, 160);
    };
    // Feasible-energy bound from the constant patterns.
    double a_bound = kInf;
    for (const auto& p : kPatterns) {
      const Eigen::VectorXd d = pattern_direction(model, p).normalized();
      const double a = crossing(d, 1e3);
      if (std::isfinite(a)) a_bound = std::min(a_bound, a);
    }
    if (!std::isfinite(a_bound)) return kInf;
    const double radius = a_bound * (1.0 + 1e-9);
    auto energy = [&](const Eigen::VectorXd& raw) {
      const double norm = raw.norm();
      if (norm == 0.0) return kInf;
      const double a = crossing(raw / norm, radius);
      return std::isfinite(a) ? 0.5 * a * a : kInf;
    };

    // Lattice of directions: sign vectors, signed axes and the patterns.
    std::vector<std::pair<double, Eigen::VectorXd>> lattice;
    auto add = [&](Eigen::VectorXd d) {
      const double e = energy(d);
      lattice.emplace_back(e, std::move(d));
    };
    for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
      Eigen::VectorXd d(dim);
      for (Eigen::Index i = 0; i < dim; ++i) d[i] = (mask >> i) & 1u ? 1.0 : -1.0;
      add(d);
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
        d[i] = sgn;
        add(d);
      }
    }
    for (const auto& p : kPatterns) add(pattern_direction(model, p));
    std::stable_sort(lattice.begin(), lattice.end(),
                     [](const auto& l, const auto& r) { return l.first < r.first; });

    // Compass search from the best lattice points.
    double best = kInf;
    const std::size_t refine = std::min<std::size_t>(6, lattice.size());
    for (std::size_t k = 0; k < refine; ++k) {
      if (!std::isfinite(lattice[k].first)) break;
      Eigen::VectorXd d = lattice[k].second.normalized();
      double e = lattice[k].first;
      double step = 0.25;
      while (step > 1e-9) {
        bool moved = false;
        for (Eigen::Index i = 0; i < dim && !moved; ++i) {
          for (double sgn : {1.0, -1.0}) {
            Eigen::VectorXd trial = d;
            trial[i] += sgn * step;
            trial.normalize();
            const double et = energy(trial);
            if (et < e) {
              d = trial;
              e = et;
              moved = true;
              break;
            }
          }
        }
        if (!moved) step *= 0.5;
      }
      best = std::min(best, e);
    }
    return best;
  };

  if (coarse.start.is_fixed()) return for_start(coarse.start.lo);
  const double lo = coarse.start.lo;
  const double hi = coarse.start.hi;
  double best = kInf;
  double best_u = lo;
  for (int i = 0; i <= 8; ++i) {
    const double u = lo + (hi - lo) * i / 8.0;
    const double e = for_start(u);
    if (e < best) {
      best = e;
      best_u = u;
    }
  }
  if (!std::isfinite(best)) return best;
  std::uintmax_t iters = 40;
  const double step = (hi - lo) / 8.0;
  const auto [u_star, e_star] = boost::math::tools::brent_find_minima(
      for_start, std::max(lo, best_u - step), std::min(hi, best_u + step), 30, iters);
  return std::min(best, e_star);
}

VariationalProblem tail_problem(const ModelParams& params, double y_level, const RateSetup& setup) {
  VariationalProblem p;
  p.id = "tail";
  p.kernel = KernelSpec::fou(params.hurst.H, params.beta, params.xi);
  p.vol = params.vol;
  p.rho = params.rho;
  p.include_drift = setup.include_drift;
  p.start = StartSpec::fixed(0.0, StartShape::Exponential, params.beta);
  p.level = y_level;
  p.sense = y_level >= 0.0 ? ConstraintSense::AtLeast : ConstraintSense::AtMost;
  p.grid = TimeGrid::uniform(setup.grid_n);
  return p;
}

RateResult tail_rate(const ModelParams& params, double y_level, double b, const RateSetup& setup) {
  if (!(b > 0.0)) throw std::invalid_argument("tail_rate needs b > 0");
  return solve(tail_problem(params, y_level, setup), setup.solver);
}

VariationalProblem smalltime_problem(const ModelParams& params, double k, const RateSetup& setup) {
  VariationalProblem p;
  p.id = "smalltime";
  p.kernel = KernelSpec::small_time_limit(params.hurst.H, params.xi);
  p.vol = params.vol;
  p.rho = params.rho;
  p.include_drift = false;
  p.start = StartSpec::fixed(0.0);
  p.level = k;
  p.sense = k >= 0.0 ? ConstraintSense::AtLeast : ConstraintSense::AtMost;
  p.grid = TimeGrid::uniform(setup.grid_n);
  return p;
}

RateResult smalltime_rate(const ModelParams& params, double k, double b, const RateSetup& setup) {
  if (!(b >= 0.0)) throw std::invalid_argument("smalltime_rate needs b >= 0");
  return solve(smalltime_problem(params, k, setup), setup.solver);
}

VariationalProblem random_start_problem(const ModelParams& params, double k, double u_lo,
                                        double u_hi, const RateSetup& setup) {
  if (params.hurst.H != 0.5) {
    throw std::invalid_argument("random-start rates are defined for the diffusive case H = 1/2");
  }
  VariationalProblem p = smalltime_problem(params, k, setup);
  p.id = "random_start";
  p.vol.sigma_tilde = params.vol.sigma;
  p.start = StartSpec::interval(u_lo, u_hi);
  return p;
}

RateResult rate_with_random_start(const ModelParams& params, double k, double u_lo, double u_hi,
                                  const RateSetup& setup) {
  return solve(random_start_problem(params, k, u_lo, u_hi, setup), setup.solver);
}

}  // namespace roughldp
