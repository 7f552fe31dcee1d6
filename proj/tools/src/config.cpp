#include "roughldp/cli/config.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace roughldp::cli {
namespace {

using nlohmann::json;

template <class E>
using Names = std::vector<std::pair<E, const char*>>;

const Names<Command> kCommands{{Command::Kernels, "kernels"},
                               {Command::Simulate, "simulate"},
                               {Command::Rate, "rate"},
                               {Command::Smile, "smile"},
                               {Command::Verify, "verify"}};
const Names<KernelKind> kKernels{{KernelKind::Fbm, "K_fbm"},
                                 {KernelKind::FractionalOU, "F_fou"},
                                 {KernelKind::SmallTimeEps, "G_eps"},
                                 {KernelKind::SmallTimeLimit, "G_zero"},
                                 {KernelKind::Identity, "Identity"}};
const Names<InitialLaw::Kind> kLaws{{InitialLaw::Kind::Point, "point"},
                                    {InitialLaw::Kind::Uniform, "uniform"},
                                    {InitialLaw::Kind::Gaussian, "gaussian"},
                                    {InitialLaw::Kind::TruncGaussian, "trunc_gaussian"},
                                    {InitialLaw::Kind::ForwardSteinStein, "forward_stein_stein"}};
const Names<RescalingScheme::Kind> kSchemes{{RescalingScheme::Kind::Tails, "tails"},
                                            {RescalingScheme::Kind::SmallTime, "small_time"},
                                            {RescalingScheme::Kind::DiffusiveSmallTime, "diffusive"}};
const Names<VolMode> kVolModes{{VolMode::Exact, "exact"}, {VolMode::ScalingLimit, "scaling_limit"}};
const Names<SlopeFit> kFits{{SlopeFit::SpeedLog, "speed_log"}, {SlopeFit::AffineEps, "affine_eps"}};
const Names<RateBlock::Problem> kProblems{{RateBlock::Problem::Tail, "tail"},
                                          {RateBlock::Problem::SmallTime, "smalltime"},
                                          {RateBlock::Problem::RandomStart, "random_start"},
                                          {RateBlock::Problem::Custom, "custom"}};
const Names<ConstraintSense> kSenses{{ConstraintSense::AtLeast, "ge"},
                                     {ConstraintSense::AtMost, "le"},
                                     {ConstraintSense::Equal, "eq"}};
const Names<SmileBlock::Kind> kSmiles{{SmileBlock::Kind::TailSlope, "tail_slope"},
                                      {SmileBlock::Kind::SmallTime, "small_time"},
                                      {SmileBlock::Kind::Forward, "forward"},
                                      {SmileBlock::Kind::MonteCarlo, "mc"}};
const Names<ScalarFn::Kind> kFns{{ScalarFn::Kind::Linear, "linear"},
                                 {ScalarFn::Kind::AffineAbs, "affine_abs"},
                                 {ScalarFn::Kind::Constant, "constant"},
                                 {ScalarFn::Kind::Tabulated, "tabulated"}};

template <class E>
const char* name_of(const Names<E>& names, E e) {
  for (const auto& [v, n] : names) {
    if (v == e) return n;
  }
  return "?";
}

// Reads one JSON object, remembering which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    return v.get<double>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(where(key) + " must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool flag(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  template <class E>
  E choice(const std::string& key, const Names<E>& names, E def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (v.is_string()) {
      for (const auto& [e, n] : names) {
        if (v.get<std::string>() == n) return e;
      }
    }
    std::string allowed;
    for (const auto& [e, n] : names) allowed += std::string(allowed.empty() ? "" : ", ") + n;
    throw ConfigError(where(key) + " must be one of: " + allowed);
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &j_.at(key);
  }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown key " + where(key));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

ScalarFn parse_fn(const json& j, const std::string& path) {
  Reader r(j, path);
  const ScalarFn::Kind kind = r.choice("kind", kFns, ScalarFn::Kind::Linear);
  ScalarFn fn;
  switch (kind) {
    case ScalarFn::Kind::Linear: fn = ScalarFn::linear(); break;
    case ScalarFn::Kind::AffineAbs: fn = ScalarFn::affine_abs(r.number("c0", 0.0), r.number("c1", 1.0)); break;
    case ScalarFn::Kind::Constant: fn = ScalarFn::constant(r.number("c", 1.0)); break;
    case ScalarFn::Kind::Tabulated: {
      const auto x = r.numbers("x", {});
      const auto y = r.numbers("y", {});
      try {
        fn = ScalarFn::tabulated(x, y);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
      }
      break;
    }
  }
  r.finish();
  return fn;
}

json fn_json(const ScalarFn& fn) {
  json j{{"kind", name_of(kFns, fn.kind())}};
  switch (fn.kind()) {
    case ScalarFn::Kind::Linear: break;
    case ScalarFn::Kind::AffineAbs: j["c0"] = fn.c0(); j["c1"] = fn.c1(); break;
    case ScalarFn::Kind::Constant: j["c"] = fn.c0(); break;
    case ScalarFn::Kind::Tabulated: j["x"] = fn.table_x(); j["y"] = fn.table_y(); break;
  }
  return j;
}

json empty_object() { return json::object(); }

const json& block(Reader& r, const std::string& key) {
  static const json empty = empty_object();
  const json* j = r.child(key);
  return j == nullptr ? empty : *j;
}

}  // namespace

std::string_view to_string(Command c) { return name_of(kCommands, c); }

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader top(j, "");
  c.command = top.choice("command", kCommands, c.command);
  c.seed = top.count("seed", c.seed);
  c.output_dir = top.text("output_dir", c.output_dir);
  c.threads = top.count("threads", c.threads);

  {
    Reader m(block(top, "model"), "model");
    c.model.lambda = m.number("lambda", c.model.lambda);
    c.model.beta = m.number("beta", c.model.beta);
    c.model.xi = m.number("xi", c.model.xi);
    c.model.rho = m.number("rho", c.model.rho);
    const double H = m.number("H", c.model.hurst.H);
    require(H > 0.0 && H < 1.0, "model.H must lie in (0, 1)");
    c.model.hurst = HurstParams::from(H);
    Reader v(block(m, "vol"), "model.vol");
    const json* sigma = v.child("sigma");
    const json* tilde = v.child("sigma_tilde");
    c.model.vol.sigma = sigma ? parse_fn(*sigma, "model.vol.sigma") : ScalarFn::linear();
    c.model.vol.sigma_tilde = tilde ? parse_fn(*tilde, "model.vol.sigma_tilde") : c.model.vol.sigma;
    c.model.vol.b = v.number("b", c.model.vol.b);
    c.model.vol.growth = v.number("growth", c.model.vol.growth);
    v.finish();
    m.finish();
    try {
      c.model.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  }
  {
    Reader l(block(top, "law"), "law");
    c.law.kind = l.choice("kind", kLaws, c.law.kind);
    c.law.a = l.number("a", c.law.a);
    c.law.b = l.number("b", c.law.b);
    c.law.radius = l.number("radius", c.law.radius);
    l.finish();
    try {
      c.law.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("law: ") + e.what());
    }
  }
  {
    Reader s(block(top, "scheme"), "scheme");
    c.scheme.kind = s.choice("kind", kSchemes, c.scheme.kind);
    c.scheme.b = s.number("b", c.scheme.b);
    s.finish();
    require(c.scheme.b >= 0.0, "scheme.b must be >= 0");
  }
  {
    Reader g(block(top, "grid"), "grid");
    c.grid_n = g.count("n", c.grid_n);
    const std::string spacing = g.text("spacing", "uniform");
    require(spacing == "uniform", "grid.spacing must be \"uniform\"");
    g.finish();
    require(c.grid_n >= 1 && c.grid_n <= 4096, "grid.n must lie in [1, 4096]");
  }
  c.eps_ladder = top.numbers("eps_ladder", c.eps_ladder);
  for (double e : c.eps_ladder) require(e > 0.0, "eps_ladder entries must be > 0");
  {
    Reader s(block(top, "solver"), "solver");
    SolverOptions& o = c.solver;
    o.max_outer = s.count("max_outer", o.max_outer);
    o.max_inner = s.count("max_inner", o.max_inner);
    o.feasibility_tol = s.number("feasibility_tol", o.feasibility_tol);
    o.kkt_tol = s.number("kkt_tol", o.kkt_tol);
    o.level_count = s.count("level_count", o.level_count);
    o.level_span = s.number("level_span", o.level_span);
    o.start_samples = s.count("start_samples", o.start_samples);
    o.multistart = s.count("multistart", o.multistart);
    s.finish();
    require(o.max_outer >= 1 && o.max_inner >= 1, "solver iteration limits must be >= 1");
    require(o.feasibility_tol > 0.0 && o.kkt_tol > 0.0, "solver tolerances must be > 0");
    require(o.level_span >= 1.0, "solver.level_span must be >= 1");
    require(o.multistart >= 1 && o.multistart <= 7, "solver.multistart must lie in [1, 7]");
  }
  {
    Reader k(block(top, "kernels"), "kernels");
    c.kernels.kind = k.choice("kind", kKernels, c.kernels.kind);
    c.kernels.eps = k.number("eps", c.kernels.eps);
    if (const json* pts = k.child("points")) {
      require(pts->is_array(), "kernels.points must be an array of [t, s] pairs");
      for (const json& p : *pts) {
        require(p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(),
                "kernels.points must be an array of [t, s] pairs");
        const double t = p[0].get<double>();
        const double s = p[1].get<double>();
        require(s > 0.0 && s < t && t <= 1.0, "kernels.points need 0 < s < t <= 1");
        c.kernels.points.emplace_back(t, s);
      }
    }
    k.finish();
  }
  {
    Reader s(block(top, "simulate"), "simulate");
    c.simulate.n_paths = s.count("n_paths", c.simulate.n_paths);
    c.simulate.level = s.number("level", c.simulate.level);
    c.simulate.vol_mode = s.choice("vol_mode", kVolModes, c.simulate.vol_mode);
    c.simulate.fit = s.choice("fit", kFits, c.simulate.fit);
    c.simulate.allow_b_violation = s.flag("allow_b_violation", c.simulate.allow_b_violation);
    s.finish();
    require(c.simulate.n_paths >= 1, "simulate.n_paths must be >= 1");
  }
  {
    Reader r(block(top, "rate"), "rate");
    RateBlock& b = c.rate;
    b.problem = r.choice("problem", kProblems, b.problem);
    b.levels = r.numbers("levels", b.levels);
    b.include_drift = r.flag("include_drift", b.include_drift);
    b.u_lo = r.number("u_lo", b.u_lo);
    b.u_hi = r.number("u_hi", b.u_hi);
    b.kernel = r.choice("kernel", kKernels, b.kernel);
    b.sense = r.choice("sense", kSenses, b.sense);
    b.start = r.number("start", b.start);
    r.finish();
    require(!b.levels.empty(), "rate.levels must not be empty");
    require(b.u_lo <= b.u_hi, "rate.u_lo must be <= rate.u_hi");
  }
  {
    Reader s(block(top, "smile"), "smile");
    SmileBlock& b = c.smile;
    b.kind = s.choice("kind", kSmiles, b.kind);
    b.k = s.numbers("k", b.k);
    b.t = s.number("t", b.t);
    b.b = s.number("b", b.b);
    b.sigma0 = s.number("sigma0", b.sigma0);
    b.support_radius = s.number("support_radius", b.support_radius);
    b.n_paths = s.count("n_paths", b.n_paths);
    s.finish();
    require(!b.k.empty(), "smile.k must not be empty");
    require(b.t > 0.0, "smile.t must be > 0");
    require(b.support_radius >= 0.0, "smile.support_radius must be >= 0");
  }
  {
    Reader v(block(top, "verify"), "verify");
    if (const json* ids = v.child("criteria")) {
      require(ids->is_array(), "verify.criteria must be an array of integers");
      c.verify.criteria.clear();
      for (const json& id : *ids) {
        require(id.is_number_integer() && id.get<int>() >= 1 && id.get<int>() <= 10,
                "verify.criteria entries must be integers in [1, 10]");
        c.verify.criteria.push_back(id.get<int>());
      }
    }
    c.verify.path_factor = v.number("path_factor", c.verify.path_factor);
    v.finish();
    require(c.verify.path_factor > 0.0, "verify.path_factor must be > 0");
  }
  top.finish();
  return c;
}

json to_json(const RunConfig& c) {
  json points = json::array();
  for (const auto& [t, s] : c.kernels.points) points.push_back({t, s});
  return json{
      {"command", name_of(kCommands, c.command)},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"threads", c.threads},
      {"model",
       {{"lambda", c.model.lambda},
        {"beta", c.model.beta},
        {"xi", c.model.xi},
        {"rho", c.model.rho},
        {"H", c.model.hurst.H},
        {"vol",
         {{"sigma", fn_json(c.model.vol.sigma)},
          {"sigma_tilde", fn_json(c.model.vol.sigma_tilde)},
          {"b", c.model.vol.b},
          {"growth", c.model.vol.growth}}}}},
      {"law", {{"kind", name_of(kLaws, c.law.kind)}, {"a", c.law.a}, {"b", c.law.b}, {"radius", c.law.radius}}},
      {"scheme", {{"kind", name_of(kSchemes, c.scheme.kind)}, {"b", c.scheme.b}}},
      {"grid", {{"n", c.grid_n}, {"spacing", "uniform"}}},
      {"eps_ladder", c.eps_ladder},
      {"solver",
       {{"max_outer", c.solver.max_outer},
        {"max_inner", c.solver.max_inner},
        {"feasibility_tol", c.solver.feasibility_tol},
        {"kkt_tol", c.solver.kkt_tol},
        {"level_count", c.solver.level_count},
        {"level_span", c.solver.level_span},
        {"start_samples", c.solver.start_samples},
        {"multistart", c.solver.multistart}}},
      {"kernels", {{"kind", name_of(kKernels, c.kernels.kind)}, {"eps", c.kernels.eps}, {"points", points}}},
      {"simulate",
       {{"n_paths", c.simulate.n_paths},
        {"level", c.simulate.level},
        {"vol_mode", name_of(kVolModes, c.simulate.vol_mode)},
        {"fit", name_of(kFits, c.simulate.fit)},
        {"allow_b_violation", c.simulate.allow_b_violation}}},
      {"rate",
       {{"problem", name_of(kProblems, c.rate.problem)},
        {"levels", c.rate.levels},
        {"include_drift", c.rate.include_drift},
        {"u_lo", c.rate.u_lo},
        {"u_hi", c.rate.u_hi},
        {"kernel", name_of(kKernels, c.rate.kernel)},
        {"sense", name_of(kSenses, c.rate.sense)},
        {"start", c.rate.start}}},
      {"smile",
       {{"kind", name_of(kSmiles, c.smile.kind)},
        {"k", c.smile.k},
        {"t", c.smile.t},
        {"b", c.smile.b},
        {"sigma0", c.smile.sigma0},
        {"support_radius", c.smile.support_radius},
        {"n_paths", c.smile.n_paths}}},
      {"verify", {{"criteria", c.verify.criteria}, {"path_factor", c.verify.path_factor}}},
  };
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override has an empty key: " + assignment);
    if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace roughldp::cli
