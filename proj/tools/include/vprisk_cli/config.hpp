#pragma once

#include <vprisk/empirical.hpp>
#include <vprisk/equivalents.hpp>
#include <vprisk/profiles.hpp>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vprisk::cli {

/// Raised for any problem with the experiment description (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Profile, RiskSweep, Descent, Eig, Gcv };

const char* to_string(Command command) noexcept;
Command parse_command(const std::string& name);

struct ExperimentConfig {
  Command command = Command::RiskSweep;

  // Profile.
  std::string profile = "constant";
  double gamma = 1.0;
  double gamma1_sq = 0.0005;
  double gamma2_sq = 1.0;
  double gamma3_sq = 1.0;
  double tau = 0.1;
  std::string profile_csv;
  std::vector<double> class_probs;
  std::vector<std::vector<double>> class_variances;
  std::uint64_t profile_seed = 1;
  bool normalize = true;

  // Test profile: empty means "columns", otherwise explicit weights.
  std::vector<double> test_weights;

  ModelParams params;

  Index n = 0;
  std::optional<Index> p;
  std::vector<double> ratios;

  std::vector<double> lambdas;

  EntryDist entry_dist = EntryDist::Gaussian;
  std::uint64_t seed = 0;
  int replications = 1;
  int mc_draws = 10000;
  double d_star = 5e-3;
  double emp_ridgeless_lambda = 1e-8;
  std::string out;

  std::vector<std::string> quantities;

  bool wants(const std::string& q) const;
};

/// Parses a flat JSON document; unknown keys and type mismatches are errors.
/// Ratio and lambda grids given by (min, max, count, scale) are expanded here.
ExperimentConfig parse_config(const nlohmann::json& doc, Command command);
ExperimentConfig load_config(const std::string& path, Command command);

/// Fully resolved configuration with defaults filled and grids expanded.
nlohmann::json resolved_json(const ExperimentConfig& config);

/// FNV-1a 64 of the resolved JSON text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Builds the (optionally normalized) profile for dimensions (n, p).
VarianceProfile build_profile(const ExperimentConfig& config, Index n, Index p);

/// Multiple that p is rounded up to in ratio sweeps; 0 when the profile has fixed dimensions.
Index profile_p_multiple(const ExperimentConfig& config);

TestProfile build_test_profile(const ExperimentConfig& config, const VarianceProfile& profile);

}  // namespace vprisk::cli
