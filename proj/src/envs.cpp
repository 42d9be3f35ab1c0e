#include "sac/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sac {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_reward_bounds(double r, const EnvSpec& spec, const char* env) {
  if (!(r >= spec.reward_min - 1e-12 && r <= spec.reward_max + 1e-12))
    throw std::logic_error(std::string(env) + ": reward " + std::to_string(r) +
                           " outside declared bounds");
}

class PendulumEnv final : public Env {
 public:
  explicit PendulumEnv(std::size_t max_steps) {
    spec_.state_dim = 3;
    spec_.action_dim = 1;
    spec_.action_low = {-kMaxTorque};
    spec_.action_high = {kMaxTorque};
    spec_.max_episode_steps = max_steps;
    spec_.reward_min = -(kPi * kPi + 0.1 * kMaxSpeed * kMaxSpeed +
                         0.001 * kMaxTorque * kMaxTorque);
    spec_.reward_max = 0.0;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(Rng& rng) override {
    theta_ = rng.uniform(-kPi, kPi);
    theta_dot_ = rng.uniform(-1.0, 1.0);
    steps_ = 0;
    return observation();
  }

  StepResult step(const std::vector<double>& action) override {
    if (action.size() != 1)
      throw std::invalid_argument("pendulum: action must be 1-D");
    const double u = clip_action(action[0], -kMaxTorque, kMaxTorque);
    const double th = wrap_angle(theta_);
    const double reward =
        -(th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);
    check_reward_bounds(reward, spec_, "pendulum");

    const double accel =
        -(3.0 * kGravity / (2.0 * kLength)) * std::sin(theta_ + kPi) +
        (3.0 / (kMass * kLength * kLength)) * u;
    const double new_theta = theta_ + theta_dot_ * kDt;
    double new_theta_dot = theta_dot_ + accel * kDt;
    new_theta_dot = std::clamp(new_theta_dot, -kMaxSpeed, kMaxSpeed);
    theta_ = new_theta;
    theta_dot_ = new_theta_dot;
    ++steps_;
    return StepResult{observation(), reward, steps_ >= spec_.max_episode_steps};
  }

  std::vector<double> save_state() const override {
    return {theta_, theta_dot_, static_cast<double>(steps_)};
  }
  void load_state(const std::vector<double>& s) override {
    theta_ = s.at(0);
    theta_dot_ = s.at(1);
    steps_ = static_cast<std::size_t>(s.at(2));
  }

  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;

 private:
  std::vector<double> observation() const {
    return {std::cos(theta_), std::sin(theta_), theta_dot_};
  }

  EnvSpec spec_;
  double theta_ = kPi;
  double theta_dot_ = 0.0;
  std::size_t steps_ = 0;
};

class PointMassEnv final : public Env {
 public:
  explicit PointMassEnv(std::size_t max_steps) {
    spec_.state_dim = 2;
    spec_.action_dim = 2;
    spec_.action_low = {-1.0, -1.0};
    spec_.action_high = {1.0, 1.0};
    spec_.max_episode_steps = max_steps;
    spec_.reward_min = -8.0;
    spec_.reward_max = 0.0;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(Rng&) override {
    px_ = 0.0;
    py_ = 0.0;
    steps_ = 0;
    return {px_, py_};
  }

  StepResult step(const std::vector<double>& action) override {
    if (action.size() != 2)
      throw std::invalid_argument("point_mass: action must be 2-D");
    const double ax = clip_action(action[0], -1.0, 1.0);
    const double ay = clip_action(action[1], -1.0, 1.0);
    px_ = std::clamp(px_ + kDt * ax, -1.0, 1.0);
    py_ = std::clamp(py_ + kDt * ay, -1.0, 1.0);
    const double dx = px_ - kGoalX, dy = py_ - kGoalY;
    const double reward = -(dx * dx + dy * dy);
    check_reward_bounds(reward, spec_, "point_mass");
    ++steps_;
    return StepResult{{px_, py_}, reward, steps_ >= spec_.max_episode_steps};
  }

  std::vector<double> save_state() const override {
    return {px_, py_, static_cast<double>(steps_)};
  }
  void load_state(const std::vector<double>& s) override {
    px_ = s.at(0);
    py_ = s.at(1);
    steps_ = static_cast<std::size_t>(s.at(2));
  }

  static constexpr double kDt = 0.05;
  static constexpr double kGoalX = 0.7;
  static constexpr double kGoalY = 0.7;

 private:
  EnvSpec spec_;
  double px_ = 0.0;
  double py_ = 0.0;
  std::size_t steps_ = 0;
};

class BanditEnv final : public Env {
 public:
  BanditEnv() {
    spec_.state_dim = 1;
    spec_.action_dim = 1;
    spec_.action_low = {-1.0};
    spec_.action_high = {1.0};
    spec_.max_episode_steps = 1;
    spec_.reward_min = -2.25;
    spec_.reward_max = 0.0;
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(Rng&) override {
    steps_ = 0;
    return {0.0};
  }

  StepResult step(const std::vector<double>& action) override {
    if (action.size() != 1)
      throw std::invalid_argument("bandit: action must be 1-D");
    const double a = clip_action(action[0], -1.0, 1.0);
    const double reward = -(a - 0.5) * (a - 0.5);
    check_reward_bounds(reward, spec_, "bandit");
    ++steps_;
    return StepResult{{0.0}, reward, steps_ >= spec_.max_episode_steps};
  }

  std::vector<double> save_state() const override {
    return {static_cast<double>(steps_)};
  }
  void load_state(const std::vector<double>& s) override {
    steps_ = static_cast<std::size_t>(s.at(0));
  }

 private:
  EnvSpec spec_;
  std::size_t steps_ = 0;
};

}  // namespace

double wrap_angle(double theta) {
  double w = std::fmod(theta + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

std::unique_ptr<Env> make_pendulum(std::size_t max_episode_steps) {
  return std::make_unique<PendulumEnv>(max_episode_steps);
}

std::unique_ptr<Env> make_point_mass(std::size_t max_episode_steps) {
  return std::make_unique<PointMassEnv>(max_episode_steps);
}

std::unique_ptr<Env> make_bandit() { return std::make_unique<BanditEnv>(); }

std::unique_ptr<Env> make_env(const std::string& name,
                              std::size_t max_episode_steps) {
  if (name == "pendulum")
    return make_pendulum(max_episode_steps ? max_episode_steps : 200);
  if (name == "point_mass")
    return make_point_mass(max_episode_steps ? max_episode_steps : 100);
  if (name == "bandit") return make_bandit();
  throw std::invalid_argument("make_env: unknown environment '" + name + "'");
}

double scripted_pendulum_controller(const std::vector<double>& observation) {
  if (observation.size() != 3)
    throw std::invalid_argument("scripted controller: bad observation");
  const double c = observation[0], s = observation[1], dot = observation[2];
  const double theta = std::atan2(s, c);
  double u;
  if (std::abs(theta) <= 0.15 && std::abs(dot) <= 2.0) {
    // PD balance near upright.
    u = -8.0 * theta - 2.0 * dot;
  } else {
    // Pump mechanical energy toward the upright-at-rest level.
    const double inertia = PendulumEnv::kMass * PendulumEnv::kLength *
                           PendulumEnv::kLength / 3.0;
    const double energy = 0.5 * inertia * dot * dot +
                          PendulumEnv::kMass * PendulumEnv::kGravity *
                              (PendulumEnv::kLength / 2.0) * c;
    const double target = PendulumEnv::kMass * PendulumEnv::kGravity *
                          (PendulumEnv::kLength / 2.0);
    const double direction = dot >= 0.0 ? 1.0 : -1.0;
    u = 0.6 * (target - energy) * direction;
  }
  return std::clamp(u, -PendulumEnv::kMaxTorque, PendulumEnv::kMaxTorque);
}

double pendulum_reference_return(std::size_t episodes, std::uint64_t seed) {
  auto env = make_pendulum();
  Rng rng(seed);
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    std::vector<double> obs = env->reset(rng);
    bool done = false;
    while (!done) {
      StepResult r = env->step({scripted_pendulum_controller(obs)});
      total += r.reward;
      obs = std::move(r.observation);
      done = r.terminal;
    }
  }
  return total / static_cast<double>(episodes);
}

}  // namespace sac
