#pragma once

#include "roughldp/kernels.hpp"
#include "roughldp/model.hpp"
#include "roughldp/rates.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughldp::cli {

/// Raised for malformed or out-of-range configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Kernels, Simulate, Rate, Smile, Verify };

struct KernelsBlock {
  KernelKind kind = KernelKind::FractionalOU;
  double eps = 0.1;
  /// (t, s) pairs; empty means every pair of grid nodes with s < t.
  std::vector<std::pair<double, double>> points;
};

struct SimulateBlock {
  std::size_t n_paths = 100000;
  double level = 1.0;
  VolMode vol_mode = VolMode::Exact;
  SlopeFit fit = SlopeFit::SpeedLog;
  bool allow_b_violation = false;
};

struct RateBlock {
  enum class Problem { Tail, SmallTime, RandomStart, Custom };
  Problem problem = Problem::Tail;
  std::vector<double> levels{1.0};
  bool include_drift = true;
  double u_lo = 0.0;
  double u_hi = 0.0;
  // Custom problems.
  KernelKind kernel = KernelKind::Identity;
  ConstraintSense sense = ConstraintSense::AtLeast;
  double start = 0.0;
};

struct SmileBlock {
  enum class Kind { TailSlope, SmallTime, Forward, MonteCarlo };
  Kind kind = Kind::TailSlope;
  std::vector<double> k{1.0};
  double t = 1.0;
  double b = 0.5;
  double sigma0 = 0.2;
  double support_radius = 4.0;
  std::size_t n_paths = 100000;
};

struct VerifyBlock {
  std::vector<int> criteria{1, 2, 4, 5, 6, 10};
  double path_factor = 1.0;
};

struct RunConfig {
  Command command = Command::Verify;
  std::uint64_t seed = 1;
  std::string output_dir = "roughldp_out";
  std::size_t threads = 0;
  ModelParams model{};
  InitialLaw law{};
  RescalingScheme scheme{};
  std::size_t grid_n = 32;
  std::vector<double> eps_ladder{0.7, 0.6, 0.5, 0.4};
  SolverOptions solver{};
  KernelsBlock kernels{};
  SimulateBlock simulate{};
  RateBlock rate{};
  SmileBlock smile{};
  VerifyBlock verify{};
};

[[nodiscard]] std::string_view to_string(Command c);

/// Parses and validates a config; unknown keys and bad values throw ConfigError.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& j);

/// Fully resolved config, defaults included; parse_config(to_json(c)) == c.
[[nodiscard]] nlohmann::json to_json(const RunConfig& c);

/// Applies "a.b.c=value"; value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace roughldp::cli
