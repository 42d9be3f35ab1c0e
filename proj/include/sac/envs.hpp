#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sac/rng.hpp"

namespace sac {

struct EnvSpec {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::vector<double> action_low;
  std::vector<double> action_high;
  std::size_t max_episode_steps = 0;
  double reward_min = 0.0;
  double reward_max = 0.0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;  // only via the step limit; no failure states
};

/// Deterministic-dynamics control task. Randomness enters only through
/// reset(). Instances are independent value objects.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(Rng& rng) = 0;
  /// Actions outside the declared bounds are clipped (and counted, see
  /// clip_warnings()).
  virtual StepResult step(const std::vector<double>& action) = 0;

  /// Physical state + step counter, for exact training resumption.
  virtual std::vector<double> save_state() const = 0;
  virtual void load_state(const std::vector<double>& state) = 0;

  std::size_t clip_warnings() const { return clip_warnings_; }

 protected:
  double clip_action(double v, double lo, double hi) {
    if (v < lo || v > hi) ++clip_warnings_;
    return v < lo ? lo : (v > hi ? hi : v);
  }
  std::size_t clip_warnings_ = 0;
};

/// Torque-limited pendulum swing-up. State (theta, theta_dot), observation
/// (cos theta, sin theta, theta_dot). Explicit Euler at dt = 0.05:
///   theta_dd = -(3g / 2l) sin(theta + pi) + (3 / m l^2) torque
///   theta'   = theta + theta_dot * dt
///   theta_dot' = clip(theta_dot + theta_dd * dt, [-8, 8])
/// Cost -(wrap(theta)^2 + 0.1 theta_dot^2 + 0.001 torque^2); 200 steps.
/// Reset: theta ~ U[-pi, pi], theta_dot ~ U[-1, 1].
std::unique_ptr<Env> make_pendulum(std::size_t max_episode_steps = 200);

/// Point on [-1,1]^2 chasing the fixed goal (0.7, 0.7):
///   p' = clip(p + 0.05 a, [-1, 1]^2), reward -|p' - goal|^2, 100 steps.
/// Reset: start at the origin.
std::unique_ptr<Env> make_point_mass(std::size_t max_episode_steps = 100);

/// One-state continuous bandit: reward -(a - 0.5)^2, one step per episode.
std::unique_ptr<Env> make_bandit();

/// Factory by config name: "pendulum", "point_mass", "bandit".
/// max_episode_steps == 0 keeps the task default.
std::unique_ptr<Env> make_env(const std::string& name,
                              std::size_t max_episode_steps = 0);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double theta);

/// Energy-shaping swing-up with a PD balance region near upright.
/// Returns a torque in [-2, 2] from a pendulum observation.
double scripted_pendulum_controller(const std::vector<double>& observation);

/// Mean return of the scripted controller over `episodes` seeded episodes;
/// the acceptance reference R_ref.
double pendulum_reference_return(std::size_t episodes, std::uint64_t seed);

}  // namespace sac
