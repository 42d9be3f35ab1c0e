#include "sac/training.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "sac/agent.hpp"
#include "sac/binio.hpp"
#include "sac/envs.hpp"
#include "sac/metrics.hpp"

namespace sac {

namespace {

constexpr char kResumeMagic[9] = "SACRESU1";
constexpr std::uint64_t kResumeVersion = 1;

// Fixed stream offsets per component; eval round k uses stream
// kEvalStreamBase + k so interruption cannot shift it.
constexpr std::uint64_t kEnvStream = 0;
constexpr std::uint64_t kActionStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kEvalStreamBase = 1000;

AgentConfig agent_config_from(const ExperimentConfig& c, const EnvSpec& spec) {
  AgentConfig a;
  a.state_dim = spec.state_dim;
  a.action_dim = spec.action_dim;
  a.hidden = c.hidden_sizes;
  a.lr = c.lr;
  a.gamma = c.gamma;
  a.tau = c.tau;
  a.reward_scale = c.reward_scale;
  a.target_update_interval = c.resolved_target_update_interval();
  a.batch_size = c.batch_size;
  a.variant = c.variant;
  a.exploration_noise = c.exploration_noise;
  return a;
}

std::vector<double> map_to_bounds(const EnvSpec& spec,
                                  const std::vector<double>& canonical) {
  std::vector<double> out(canonical.size());
  for (std::size_t i = 0; i < canonical.size(); ++i)
    out[i] = spec.action_low[i] +
             0.5 * (canonical[i] + 1.0) * (spec.action_high[i] - spec.action_low[i]);
  return out;
}

void write_rng(std::ostream& out, const Rng& rng) {
  for (std::uint64_t w : rng.state()) binio::write_u64(out, w);
}

void read_rng(std::istream& in, Rng& rng) {
  std::array<std::uint64_t, 4> s;
  for (auto& w : s) w = binio::read_u64(in);
  rng.set_state(s);
}

struct EvalStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

EvalStats evaluate(const ExperimentConfig& config, const Agent& agent,
                   std::uint64_t seed, std::uint64_t round) {
  auto env = make_env(config.env, config.max_episode_steps);
  Rng rng(seed, kEvalStreamBase + round);
  EvalStats stats;
  for (std::size_t e = 0; e < config.eval_episodes; ++e) {
    std::vector<double> obs = env->reset(rng);
    double total = 0.0;
    bool done = false;
    while (!done) {
      auto a = act(agent, obs, ActionMode::kDeterministic, rng);
      StepResult r = env->step(map_to_bounds(env->spec(), a));
      total += r.reward;
      obs = std::move(r.observation);
      done = r.terminal;
    }
    if (e == 0) {
      stats.min = stats.max = total;
    } else {
      stats.min = std::min(stats.min, total);
      stats.max = std::max(stats.max, total);
    }
    stats.mean += total;
  }
  stats.mean /= static_cast<double>(config.eval_episodes);
  return stats;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

RunPaths run_paths(const std::filesystem::path& out_dir, std::uint64_t seed) {
  const std::string tag = "_seed" + std::to_string(seed);
  return RunPaths{out_dir / ("metrics" + tag + ".csv"),
                  out_dir / ("checkpoint" + tag + ".bin"),
                  out_dir / ("resume" + tag + ".bin")};
}

std::filesystem::path run_training(const ExperimentConfig& config,
                                   std::uint64_t seed,
                                   const std::filesystem::path& out_dir,
                                   bool resume) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  const RunPaths paths = run_paths(out_dir, seed);

  auto env = make_env(config.env, config.max_episode_steps);
  const EnvSpec& spec = env->spec();
  const std::size_t adim = spec.action_dim;

  Rng env_rng(seed, kEnvStream);
  Rng action_rng(seed, kActionStream);
  Rng train_rng(seed, kTrainStream);

  Agent agent = make_agent(agent_config_from(config, spec), seed);
  ReplayBuffer buffer(config.buffer_capacity);
  std::uint64_t env_step = 0;
  std::vector<double> obs;

  if (resume) {
    std::ifstream in(paths.resume, std::ios::binary);
    if (!in)
      throw std::runtime_error("run_training: no resume bundle at " +
                               paths.resume.string());
    binio::expect_magic(in, kResumeMagic, "run_training resume");
    if (binio::read_u64(in) != kResumeVersion)
      throw std::runtime_error("run_training: unsupported resume version");
    env_step = binio::read_u64(in);
    obs = binio::read_f64_block(in);
    env->load_state(binio::read_f64_block(in));
    read_rng(in, env_rng);
    read_rng(in, action_rng);
    read_rng(in, train_rng);
    buffer = ReplayBuffer::load(in);
    agent = load_agent(in);
    if (env_step > config.total_env_steps)
      throw std::runtime_error(
          "run_training: resume bundle is past total_env_steps");
  } else {
    obs = env->reset(env_rng);
  }

  std::ofstream metrics(paths.metrics,
                        resume ? std::ios::app : std::ios::trunc);
  if (!metrics)
    throw std::runtime_error("run_training: cannot open " +
                             paths.metrics.string());
  if (!resume) write_metrics_header(metrics);

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t gradient_steps = config.resolved_gradient_steps();
  StepMetrics last{};

  for (; env_step < config.total_env_steps; ++env_step) {
    std::vector<double> canonical(adim);
    if (env_step < config.warmup_steps) {
      for (auto& a : canonical) a = action_rng.uniform(-1.0, 1.0);
    } else {
      canonical = act(agent, obs, ActionMode::kStochastic, action_rng);
    }
    StepResult result = env->step(map_to_bounds(spec, canonical));
    buffer.push(Transition{obs, canonical, result.reward, result.observation,
                           result.terminal});
    obs = result.terminal ? env->reset(env_rng) : std::move(result.observation);

    if (env_step >= config.warmup_steps)
      for (std::size_t gs = 0; gs < gradient_steps; ++gs)
        last = train_step(agent, buffer, train_rng);

    if ((env_step + 1) % config.eval_interval == 0) {
      const std::uint64_t round = (env_step + 1) / config.eval_interval;
      EvalStats stats = evaluate(config, agent, seed, round);
      MetricsRow row;
      row.env_step = env_step + 1;
      row.eval_return_mean = stats.mean;
      row.eval_return_min = stats.min;
      row.eval_return_max = stats.max;
      row.loss_v = last.j_v;
      row.loss_q1 = last.j_q1;
      row.loss_q2 = last.j_q2;
      row.loss_pi = last.j_pi;
      row.policy_entropy = last.entropy;
      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      write_metrics_row(metrics, row);
      metrics.flush();
    }
  }

  save_agent(agent, paths.checkpoint);
  {
    std::ofstream bundle(paths.resume, std::ios::binary);
    if (!bundle)
      throw std::runtime_error("run_training: cannot open " +
                               paths.resume.string());
    binio::write_magic(bundle, kResumeMagic);
    binio::write_u64(bundle, kResumeVersion);
    binio::write_u64(bundle, env_step);
    binio::write_f64_block(bundle, obs);
    binio::write_f64_block(bundle, env->save_state());
    write_rng(bundle, env_rng);
    write_rng(bundle, action_rng);
    write_rng(bundle, train_rng);
    buffer.save(bundle);
    save_agent(agent, bundle);
    if (!bundle) throw std::runtime_error("run_training: bundle write failed");
  }
  return paths.metrics;
}

SweepResult run_sweep(const ExperimentConfig& config, const std::string& axis,
                      const std::vector<double>& values,
                      const std::filesystem::path& out_dir,
                      std::size_t max_workers) {
  if (axis != "reward_scale" && axis != "tau")
    throw std::invalid_argument("run_sweep: axis must be reward_scale or tau");
  if (values.empty())
    throw std::invalid_argument("run_sweep: no axis values");
  config.validate();
  std::filesystem::create_directories(out_dir);

  struct Job {
    double value;
    std::uint64_t seed;
    ExperimentConfig cfg;
    std::filesystem::path dir;
  };
  std::vector<Job> jobs;
  for (double v : values) {
    ExperimentConfig sub = config;
    if (axis == "reward_scale")
      sub.reward_scale = v;
    else
      sub.tau = v;
    const auto dir = out_dir / (axis + "_" + format_value(v));
    for (std::uint64_t seed : config.seeds)
      jobs.push_back(Job{v, seed, sub, dir});
  }

  std::size_t workers = max_workers ? max_workers
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto run_jobs = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        run_training(jobs[i].cfg, jobs[i].seed, jobs[i].dir);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(run_jobs);
  run_jobs();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult result;
  result.long_csv = out_dir / "sweep_long.csv";
  result.summary_csv = out_dir / "sweep_summary.csv";
  std::ofstream long_out(result.long_csv);
  std::ofstream summary_out(result.summary_csv);
  if (!long_out || !summary_out)
    throw std::runtime_error("run_sweep: cannot write sweep CSVs");
  long_out << axis
           << ",seed,env_step,eval_return_mean,eval_return_min,"
              "eval_return_max,loss_v,loss_q1,loss_q2,loss_pi,policy_entropy\n";
  summary_out << axis << ",seed,final_eval_return_mean,final_policy_entropy\n";
  summary_out.precision(17);
  long_out.precision(17);
  for (const Job& job : jobs) {
    const auto rows = read_metrics(run_paths(job.dir, job.seed).metrics);
    for (const auto& r : rows) {
      long_out << format_value(job.value) << ',' << job.seed << ','
               << r.env_step << ',' << r.eval_return_mean << ','
               << r.eval_return_min << ',' << r.eval_return_max << ','
               << r.loss_v << ',' << r.loss_q1 << ',' << r.loss_q2 << ','
               << r.loss_pi << ',' << r.policy_entropy << '\n';
    }
    if (!rows.empty()) {
      const auto& last = rows.back();
      summary_out << format_value(job.value) << ',' << job.seed << ','
                  << last.eval_return_mean << ',' << last.policy_entropy
                  << '\n';
      result.summary.push_back(SweepSummaryRow{job.value, job.seed,
                                               last.eval_return_mean,
                                               last.policy_entropy});
    }
  }
  return result;
}

}  // namespace sac
