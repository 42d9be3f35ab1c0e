#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sac/agent.hpp"

namespace sac {

/// Experiment configuration, read from flat `key = value` text.
/// '#' starts a comment; unknown keys are rejected. Numeric fields use '.'
/// as the decimal separator. A value of 0 for target_update_interval or
/// gradient_steps means "variant default" (1/1 for Polyak targets, 1000/4
/// for the hard-update variants).
struct ExperimentConfig {
  std::string env = "pendulum";
  std::size_t max_episode_steps = 0;  // 0 = task default
  AgentVariant variant = AgentVariant::kSoftPolyak;
  std::vector<std::size_t> hidden_sizes = {64, 64};
  double lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 100000;
  double reward_scale = 1.0;
  std::size_t target_update_interval = 0;  // 0 = variant default
  std::size_t gradient_steps = 0;          // 0 = variant default
  std::size_t total_env_steps = 50000;
  std::size_t eval_interval = 1000;
  std::size_t eval_episodes = 10;
  std::size_t warmup_steps = 1000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double exploration_noise = 0.1;

  std::size_t resolved_target_update_interval() const;
  std::size_t resolved_gradient_steps() const;

  void validate() const;

  /// Table-defaults for a task: pendulum and point_mass use reward scale 5,
  /// the bandit 1.
  static ExperimentConfig defaults_for(const std::string& env_name);

  static ExperimentConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

AgentVariant parse_variant(const std::string& name);
std::string variant_name(AgentVariant v);

}  // namespace sac
