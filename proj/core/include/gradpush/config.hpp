#ifndef GRADPUSH_CONFIG_HPP
#define GRADPUSH_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gradpush/objectives.hpp"

namespace gradpush {

enum class GraphGeneratorKind {
  cycle_plus_random,
  alternating_stars,
  complete,
  ring,
  edge_list
};

struct GraphConfig {
  GraphGeneratorKind generator = GraphGeneratorKind::cycle_plus_random;
  int hub_a = 0;                            // alternating_stars
  int hub_b = 1;                            // alternating_stars
  std::string path;                         // edge_list
  std::optional<std::uint64_t> fixed_seed;  // same realization in every run
  int B = 1;                                // declared connectivity window
};

enum class ObjectivePresetKind { quadratic_estimation, random_quadratic };

struct ObjectiveConfig {
  ObjectivePresetKind preset = ObjectivePresetKind::quadratic_estimation;
  double theta_hat = 0.0;  // quadratic_estimation
  double mu_lo = 1.0;      // random_quadratic
  double mu_hi = 4.0;      // random_quadratic
  double noise_c = 0.0;
  NoiseLaw noise_law = NoiseLaw::uniform_ball;
  std::optional<std::uint64_t> fixed_seed;  // same instance in every run
};

enum class InitMode { gaussian, gaussian_fixed, zeros };

struct InitConfig {
  InitMode mode = InitMode::gaussian;
  double scale = 1.0;
};

enum class ScheduleMode { theorem1, conservative_min, explicit_p };

struct ScheduleConfig {
  ScheduleMode mode = ScheduleMode::theorem1;
  double p = 0.0;             // explicit_p
  std::optional<int> rounds;  // conservative_min; defaults to n*B
};

/// Full experiment description. Loaded from a JSON document; unknown keys
/// are errors so a config that parses is a config that reproduces.
struct ExperimentConfig {
  std::string name;
  int n = 1;
  int d = 1;
  std::int64_t horizon = 2;
  int runs = 1;
  std::uint64_t seed = 0;
  GraphConfig graph;
  ObjectiveConfig objective;
  InitConfig init;
  ScheduleConfig schedule;
  std::set<std::string> metrics;
  int sample_count = 5;             // ignored when sample_nodes is explicit
  std::vector<int> sample_nodes;    // empty = draw sample_count nodes by seed
  std::string output = "trace.csv";
};

/// Metric names accepted in "metrics". "zhat" expands to one row per
/// coordinate (zhat0..zhat{d-1}).
const std::set<std::string>& known_metrics();

/// Parses and validates; `origin` labels error messages.
ExperimentConfig parse_config_json(const std::string& text, const std::string& origin);

ExperimentConfig load_config(const std::string& path);

/// Field-level checks (ranges, metric names, preset/dimension consistency).
/// Throws ValidationError naming the offending field.
void validate_config(const ExperimentConfig& cfg);

}  // namespace gradpush

#endif
