#include "sac/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sac::tabular {

namespace {
constexpr std::size_t kIterationCap = 1'000'000;
}

double TabularMdp::reward_max_abs() const {
  double m = 0.0;
  for (double v : reward) m = std::max(m, std::abs(v));
  return m;
}

void TabularMdp::validate() const {
  if (n_states == 0 || n_actions == 0)
    throw std::invalid_argument("TabularMdp: empty state or action space");
  if (transition.size() != n_states * n_actions * n_states ||
      reward.size() != n_states * n_actions ||
      initial_distribution.size() != n_states)
    throw std::invalid_argument("TabularMdp: array size mismatch");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("TabularMdp: gamma must be in [0, 1)");
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (std::size_t s2 = 0; s2 < n_states; ++s2) {
        double v = p(s, a, s2);
        if (v < 0.0) throw std::invalid_argument("TabularMdp: negative prob");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("TabularMdp: transition row (" +
                                    std::to_string(s) + "," +
                                    std::to_string(a) + ") sums to " +
                                    std::to_string(sum));
    }
  for (double v : reward)
    if (!std::isfinite(v))
      throw std::invalid_argument("TabularMdp: non-finite reward");
  double d0 = 0.0;
  for (double v : initial_distribution) {
    if (v < 0.0)
      throw std::invalid_argument("TabularMdp: negative initial prob");
    d0 += v;
  }
  if (std::abs(d0 - 1.0) > 1e-12)
    throw std::invalid_argument("TabularMdp: initial distribution sums to " +
                                std::to_string(d0));
}

TabularPolicy TabularPolicy::uniform(std::size_t n_states,
                                     std::size_t n_actions) {
  TabularPolicy p;
  p.n_states = n_states;
  p.n_actions = n_actions;
  p.probs.assign(n_states * n_actions, 1.0 / static_cast<double>(n_actions));
  return p;
}

double TabularPolicy::max_row_distance(const TabularPolicy& other) const {
  double worst = 0.0;
  for (std::size_t s = 0; s < n_states; ++s) {
    double d = 0.0;
    for (std::size_t a = 0; a < n_actions; ++a)
      d += std::abs(pi(s, a) - other.pi(s, a));
    worst = std::max(worst, d);
  }
  return worst;
}

QTable QTable::zeros(std::size_t n_states, std::size_t n_actions) {
  QTable q;
  q.n_states = n_states;
  q.n_actions = n_actions;
  q.q.assign(n_states * n_actions, 0.0);
  return q;
}

double QTable::sup_distance(const QTable& other) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    worst = std::max(worst, std::abs(q[i] - other.q[i]));
  return worst;
}

std::vector<double> soft_values(const QTable& q, const TabularPolicy& pi,
                                Temperature alpha) {
  std::vector<double> v(q.n_states, 0.0);
  for (std::size_t s = 0; s < q.n_states; ++s) {
    double acc = 0.0;
    for (std::size_t a = 0; a < q.n_actions; ++a) {
      const double p = pi.pi(s, a);
      if (p > 0.0) acc += p * (q.at(s, a) - alpha.alpha * std::log(p));
    }
    v[s] = acc;
  }
  return v;
}

QTable soft_backup(const QTable& q, const TabularPolicy& pi,
                   const TabularMdp& mdp, Temperature alpha) {
  const std::vector<double> v = soft_values(q, pi, alpha);
  QTable out = QTable::zeros(mdp.n_states, mdp.n_actions);
  for (std::size_t s = 0; s < mdp.n_states; ++s)
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      double exp_v = 0.0;
      const double* row =
          mdp.transition.data() + (s * mdp.n_actions + a) * mdp.n_states;
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2)
        exp_v += row[s2] * v[s2];
      out.q[s * mdp.n_actions + a] = mdp.r(s, a) + mdp.gamma * exp_v;
    }
  return out;
}

QTable soft_policy_evaluation(const TabularPolicy& pi, const TabularMdp& mdp,
                              Temperature alpha, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("soft_policy_evaluation: tol must be > 0");
  QTable q = QTable::zeros(mdp.n_states, mdp.n_actions);
  for (std::size_t it = 0; it < kIterationCap; ++it) {
    QTable next = soft_backup(q, pi, mdp, alpha);
    const double delta = q.sup_distance(next);
    q = std::move(next);
    if (delta < tol) return q;
  }
  throw std::runtime_error(
      "soft_policy_evaluation: iteration cap exceeded (malformed MDP?)");
}

TabularPolicy soft_policy_improvement(const QTable& q, Temperature alpha) {
  TabularPolicy out;
  out.n_states = q.n_states;
  out.n_actions = q.n_actions;
  out.probs.assign(q.n_states * q.n_actions, 0.0);
  for (std::size_t s = 0; s < q.n_states; ++s) {
    double qmax = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q.n_actions; ++a)
      qmax = std::max(qmax, q.at(s, a));
    double z = 0.0;
    for (std::size_t a = 0; a < q.n_actions; ++a) {
      const double e = std::exp((q.at(s, a) - qmax) / alpha.alpha);
      out.probs[s * q.n_actions + a] = e;
      z += e;
    }
    for (std::size_t a = 0; a < q.n_actions; ++a)
      out.probs[s * q.n_actions + a] /= z;
  }
  return out;
}

IterationResult soft_policy_iteration(const TabularMdp& mdp, Temperature alpha,
                                      double tol, double eval_tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("soft_policy_iteration: tol must be > 0");
  mdp.validate();
  TabularPolicy pi = TabularPolicy::uniform(mdp.n_states, mdp.n_actions);
  QTable q = QTable::zeros(mdp.n_states, mdp.n_actions);
  for (std::size_t it = 1; it <= kIterationCap; ++it) {
    q = soft_policy_evaluation(pi, mdp, alpha, eval_tol);
    TabularPolicy next = soft_policy_improvement(q, alpha);
    const double moved = pi.max_row_distance(next);
    pi = std::move(next);
    if (moved < tol) return IterationResult{std::move(pi), std::move(q), it};
  }
  throw std::runtime_error("soft_policy_iteration: iteration cap exceeded");
}

double maxent_objective(const TabularPolicy& pi, const TabularMdp& mdp,
                        Temperature alpha, std::size_t horizon) {
  // Per-state expected one-step payoff: E_a[r] + alpha * H(pi(.|s)).
  std::vector<double> payoff(mdp.n_states, 0.0);
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    double acc = 0.0;
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      const double p = pi.pi(s, a);
      if (p > 0.0) acc += p * (mdp.r(s, a) - alpha.alpha * std::log(p));
    }
    payoff[s] = acc;
  }
  std::vector<double> dist = mdp.initial_distribution;
  std::vector<double> next(mdp.n_states, 0.0);
  double j = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t s = 0; s < mdp.n_states; ++s) j += discount * dist[s] * payoff[s];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < mdp.n_states; ++s) {
      if (dist[s] == 0.0) continue;
      for (std::size_t a = 0; a < mdp.n_actions; ++a) {
        const double w = dist[s] * pi.pi(s, a);
        if (w == 0.0) continue;
        const double* row =
            mdp.transition.data() + (s * mdp.n_actions + a) * mdp.n_states;
        for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2)
          next[s2] += w * row[s2];
      }
    }
    dist.swap(next);
    discount *= mdp.gamma;
  }
  return j;
}

std::size_t required_horizon(const TabularMdp& mdp, Temperature alpha,
                             double precision) {
  if (mdp.gamma == 0.0) return 1;
  const double bound =
      (mdp.reward_max_abs() +
       alpha.alpha * std::log(static_cast<double>(mdp.n_actions))) /
      (1.0 - mdp.gamma);
  std::size_t h = 1;
  double tail = bound;
  while (tail >= precision && h < kIterationCap) {
    tail *= mdp.gamma;
    ++h;
  }
  return h;
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mdp: cannot open " + path.string());
  std::stringstream filtered;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    filtered << line << '\n';
  }
  TabularMdp mdp;
  if (!(filtered >> mdp.n_states >> mdp.n_actions >> mdp.gamma))
    throw std::runtime_error("load_mdp: bad header in " + path.string());
  auto read_block = [&](std::vector<double>& dst, std::size_t n,
                        const char* what) {
    dst.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!(filtered >> dst[i]))
        throw std::runtime_error(std::string("load_mdp: truncated ") + what +
                                 " in " + path.string());
  };
  read_block(mdp.initial_distribution, mdp.n_states, "initial distribution");
  read_block(mdp.transition, mdp.n_states * mdp.n_actions * mdp.n_states,
             "transition table");
  read_block(mdp.reward, mdp.n_states * mdp.n_actions, "reward table");
  mdp.validate();
  return mdp;
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  mdp.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mdp: cannot open " + path.string());
  out.precision(17);
  out << mdp.n_states << " " << mdp.n_actions << " " << mdp.gamma << "\n";
  for (std::size_t s = 0; s < mdp.n_states; ++s)
    out << mdp.initial_distribution[s] << (s + 1 < mdp.n_states ? ' ' : '\n');
  for (std::size_t s = 0; s < mdp.n_states; ++s)
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2)
        out << mdp.p(s, a, s2) << (s2 + 1 < mdp.n_states ? ' ' : '\n');
    }
  for (std::size_t s = 0; s < mdp.n_states; ++s)
    for (std::size_t a = 0; a < mdp.n_actions; ++a)
      out << mdp.r(s, a) << (a + 1 < mdp.n_actions ? ' ' : '\n');
  if (!out) throw std::runtime_error("save_mdp: write failed");
}

}  // namespace sac::tabular
