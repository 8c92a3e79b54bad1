#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sadp/plant.hpp"
#include "sadp/policy.hpp"

namespace sadp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where measurement noise enters: the identifier only, or both the
/// identifier and the controller's state argument.
enum class NoiseWiring { both, kf_only };

struct SimConfig {
  std::string plant = "lewis2d";
  /// Overrides `plant` when set; used by library callers with their own f.
  std::optional<PlantModel> custom_plant;

  Vector x0 = (Vector(2) << 0.5, 1.0).finished();
  Vector u0 = Vector::Ones(1);  // a single value is broadcast to every control
  double dt = 1e-3;
  double T = 5.0;
  double sigma = 1.0;
  NoiseWiring noise_wiring = NoiseWiring::both;

  Vector q_cost = Vector::Constant(2, 2.0);  // diagonal of Q
  Vector r_cost = Vector::Constant(1, 2.0);  // diagonal of R

  Eigen::Index L = 10;
  double q_kf = 1e-6;
  std::optional<double> r_kf;  // unset: max(sigma², 1e-6)
  double p0 = 1e3;

  double alpha = 0.1;
  double beta = 1e-4;
  int n_critic_iter = 20;
  int n_actor_iter = 1;
  Eigen::Index N = 4;
  ControllerKind controller = ControllerKind::sadpq;
  GradientMode gradient_mode = GradientMode::total;
  double u_clamp = 0.0;  // |u_i| bound after each update; 0 disables

  std::vector<std::uint64_t> seeds{0};

  double threshold = 0.1;  // fraction of ‖x0‖ for time-to-threshold
  int sustain_steps = 100;

  PlantModel plant_model() const;
  RunningCost running_cost() const;
  double effective_r_kf() const { return r_kf ? *r_kf : std::max(sigma * sigma, 1e-6); }
  Eigen::Index step_count() const;
  /// Control dimension-sized initial control (u0 broadcast if needed).
  Vector initial_control() const;
};

/// Keys accepted by set_field, the config file and the CLI.
const std::vector<std::string>& config_keys();

/// Assigns one field from its textual form. Lists are comma separated.
/// Throws ConfigError on unknown keys or malformed values.
void set_field(SimConfig& cfg, std::string_view key, std::string_view value);

/// `key = value` lines; `#` starts a comment; blank lines ignored.
SimConfig parse_config(std::string_view text, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});

/// Throws ConfigError if the configuration cannot be simulated.
void validate(const SimConfig& cfg);

/// Canonical `key = value` listing of every field except the seeds.
std::string serialize(const SimConfig& cfg);

/// FNV-1a 64 of serialize(cfg).
std::uint64_t config_hash(const SimConfig& cfg);

}  // namespace sadp
