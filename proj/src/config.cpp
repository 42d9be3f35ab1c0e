#include "sac/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sac {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value for '" + key +
                             "': " + v);
  }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  double x = parse_double(key, v);
  if (x < 0 || x != static_cast<double>(static_cast<std::uint64_t>(x)))
    throw std::runtime_error("config: '" + key +
                             "' must be a non-negative integer");
  return static_cast<std::size_t>(x);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          T (*one)(const std::string&, const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(one(key, item));
  }
  if (out.empty())
    throw std::runtime_error("config: empty list for '" + key + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  return parse_size(key, v);
}

}  // namespace

AgentVariant parse_variant(const std::string& name) {
  if (name == "soft_polyak") return AgentVariant::kSoftPolyak;
  if (name == "soft_hard_target") return AgentVariant::kSoftHardTarget;
  if (name == "deterministic_ablation")
    return AgentVariant::kDeterministicAblation;
  throw std::runtime_error("config: unknown variant '" + name + "'");
}

std::string variant_name(AgentVariant v) {
  switch (v) {
    case AgentVariant::kSoftPolyak: return "soft_polyak";
    case AgentVariant::kSoftHardTarget: return "soft_hard_target";
    case AgentVariant::kDeterministicAblation:
      return "deterministic_ablation";
  }
  return "unknown";
}

std::size_t ExperimentConfig::resolved_target_update_interval() const {
  if (target_update_interval != 0) return target_update_interval;
  return variant == AgentVariant::kSoftPolyak ? 1 : 1000;
}

std::size_t ExperimentConfig::resolved_gradient_steps() const {
  if (gradient_steps != 0) return gradient_steps;
  return variant == AgentVariant::kSoftPolyak ? 1 : 4;
}

void ExperimentConfig::validate() const {
  if (env != "pendulum" && env != "point_mass" && env != "bandit")
    throw std::runtime_error("config: unknown env '" + env + "'");
  if (hidden_sizes.empty())
    throw std::runtime_error("config: hidden_sizes must be non-empty");
  if (seeds.empty()) throw std::runtime_error("config: seeds must be non-empty");
  if (eval_interval == 0 || eval_episodes == 0)
    throw std::runtime_error("config: eval_interval/eval_episodes must be > 0");
  if (batch_size == 0 || buffer_capacity == 0)
    throw std::runtime_error("config: batch/buffer must be > 0");
  if (!(reward_scale > 0.0))
    throw std::runtime_error("config: reward_scale must be > 0");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::runtime_error("config: gamma must be in [0, 1)");
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::runtime_error("config: tau must be in [0, 1]");
  if (!(lr >= 0.0)) throw std::runtime_error("config: lr must be >= 0");
}

ExperimentConfig ExperimentConfig::defaults_for(const std::string& env_name) {
  ExperimentConfig c;
  c.env = env_name;
  if (env_name == "pendulum") {
    c.reward_scale = 5.0;
  } else if (env_name == "point_mass") {
    c.reward_scale = 5.0;
    c.total_env_steps = 20000;
  } else if (env_name == "bandit") {
    c.reward_scale = 1.0;
    c.hidden_sizes = {32, 32};
    c.batch_size = 128;
    c.buffer_capacity = 10000;
    c.total_env_steps = 4000;
    c.eval_interval = 500;
    c.warmup_steps = 500;
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("config: cannot open " + path.string());
  ExperimentConfig base;  // env defaults applied after the env key is known
  bool env_seen = false;
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               " is not 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::runtime_error("config: empty key or value at line " +
                               std::to_string(line_no));
    if (key == "env") {
      base = defaults_for(value);
      env_seen = true;
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  if (!env_seen)
    throw std::runtime_error("config: missing required key 'env'");

  ExperimentConfig c = base;
  for (const auto& [key, value] : entries) {
    if (key == "env") {
      c.env = value;
    } else if (key == "variant") {
      c.variant = parse_variant(value);
    } else if (key == "hidden_sizes") {
      c.hidden_sizes = parse_list<std::size_t>(key, value, parse_size);
    } else if (key == "lr") {
      c.lr = parse_double(key, value);
    } else if (key == "gamma") {
      c.gamma = parse_double(key, value);
    } else if (key == "tau") {
      c.tau = parse_double(key, value);
    } else if (key == "batch_size") {
      c.batch_size = parse_size(key, value);
    } else if (key == "buffer_capacity") {
      c.buffer_capacity = parse_size(key, value);
    } else if (key == "reward_scale") {
      c.reward_scale = parse_double(key, value);
    } else if (key == "target_update_interval") {
      c.target_update_interval = parse_size(key, value);
    } else if (key == "gradient_steps") {
      c.gradient_steps = parse_size(key, value);
    } else if (key == "total_env_steps") {
      c.total_env_steps = parse_size(key, value);
    } else if (key == "eval_interval") {
      c.eval_interval = parse_size(key, value);
    } else if (key == "eval_episodes") {
      c.eval_episodes = parse_size(key, value);
    } else if (key == "warmup_steps") {
      c.warmup_steps = parse_size(key, value);
    } else if (key == "max_episode_steps") {
      c.max_episode_steps = parse_size(key, value);
    } else if (key == "seeds") {
      c.seeds = parse_list<std::uint64_t>(key, value, parse_u64);
    } else if (key == "exploration_noise") {
      c.exploration_noise = parse_double(key, value);
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("config: cannot write " + path.string());
  out.precision(17);
  out << "env = " << env << "\n";
  out << "variant = " << variant_name(variant) << "\n";
  out << "hidden_sizes = ";
  for (std::size_t i = 0; i < hidden_sizes.size(); ++i)
    out << (i ? "," : "") << hidden_sizes[i];
  out << "\n";
  out << "lr = " << lr << "\n";
  out << "gamma = " << gamma << "\n";
  out << "tau = " << tau << "\n";
  out << "batch_size = " << batch_size << "\n";
  out << "buffer_capacity = " << buffer_capacity << "\n";
  out << "reward_scale = " << reward_scale << "\n";
  out << "target_update_interval = " << target_update_interval << "\n";
  out << "gradient_steps = " << gradient_steps << "\n";
  out << "total_env_steps = " << total_env_steps << "\n";
  out << "eval_interval = " << eval_interval << "\n";
  out << "eval_episodes = " << eval_episodes << "\n";
  out << "warmup_steps = " << warmup_steps << "\n";
  out << "max_episode_steps = " << max_episode_steps << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i)
    out << (i ? "," : "") << seeds[i];
  out << "\n";
  out << "exploration_noise = " << exploration_noise << "\n";
}

}  // namespace sac
