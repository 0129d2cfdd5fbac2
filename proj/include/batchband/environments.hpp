#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "batchband/core.hpp"
#include "batchband/rng.hpp"

namespace batchband {

// A reward-generating process over K arms, optionally with a context drawn
// each round. Implementations are immutable; all randomness comes from the
// caller's stream.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t num_arms() const = 0;
  // Dimension p of the per-round context; 0 when the bandit is not contextual.
  virtual std::size_t context_dim() const = 0;
  virtual std::vector<double> draw_context(Rng& rng) const = 0;

  virtual double mean_reward(std::span<const double> context, ActionIndex arm) const = 0;
  virtual double sample_reward(std::span<const double> context, ActionIndex arm, Rng& rng) const = 0;

  // Instantaneous pseudo-regret of pulling `arm` under `context`.
  virtual double gap(std::span<const double> context, ActionIndex arm) const;
  virtual ActionIndex best_arm(std::span<const double> context) const;

  virtual std::string name() const = 0;
};

class BernoulliEnv final : public Environment {
 public:
  // Requires K >= 2 and every mean in [0, 1].
  explicit BernoulliEnv(std::vector<double> means, std::string name = {});

  std::size_t num_arms() const override { return means_.size(); }
  std::size_t context_dim() const override { return 0; }
  std::vector<double> draw_context(Rng&) const override { return {}; }

  double mean_reward(std::span<const double>, ActionIndex arm) const override {
    return means_[arm];
  }
  double sample_reward(std::span<const double>, ActionIndex arm, Rng& rng) const override {
    return rng.bernoulli(means_[arm]) ? 1.0 : 0.0;
  }
  double gap(std::span<const double>, ActionIndex arm) const override { return gaps_[arm]; }
  ActionIndex best_arm(std::span<const double>) const override { return best_; }

  std::string name() const override { return name_; }

  std::span<const double> means() const { return means_; }
  std::span<const double> gaps() const { return gaps_; }
  Instance instance() const { return Instance::stochastic(means_); }

 private:
  std::vector<double> means_;
  std::vector<double> gaps_;
  ActionIndex best_ = 0;
  std::string name_;
};

// Names accepted by preset(), in order.
std::vector<std::string> preset_names();

// Bernoulli mean vectors env1..env6.
BernoulliEnv preset(std::string_view name);

// A preset name, or inline means separated by '/', e.g. "0.9/0.1".
BernoulliEnv parse_env(std::string_view spec);

// Delta_a = max_a mu_a - mu_a.
std::vector<double> gaps(const BernoulliEnv& env);

inline double sample_reward(const Environment& env, ActionIndex arm, Rng& rng,
                            std::span<const double> context = {}) {
  return env.sample_reward(context, arm, rng);
}

// Block one-hot feature map: psi(c, i) places c into slot i of a p*K vector.
std::vector<double> block_features(std::span<const double> context, ActionIndex arm,
                                   std::size_t num_arms);

// Contextual linear bandit with rewards <theta, psi(C_t, i)> + N(0, 1) noise
// and contexts drawn uniformly from the unit sphere in R^p.
class LinearContextualEnv final : public Environment {
 public:
  LinearContextualEnv(Instance theta, std::size_t context_dim, std::size_t num_arms);

  // theta drawn uniformly from the unit sphere in R^{pK}.
  static LinearContextualEnv random(std::size_t context_dim, std::size_t num_arms,
                                    std::uint64_t seed);

  std::size_t num_arms() const override { return num_arms_; }
  std::size_t context_dim() const override { return context_dim_; }
  std::vector<double> draw_context(Rng& rng) const override;

  double mean_reward(std::span<const double> context, ActionIndex arm) const override;
  double sample_reward(std::span<const double> context, ActionIndex arm, Rng& rng) const override;

  std::string name() const override;

  const Instance& theta() const { return theta_; }

 private:
  Instance theta_;
  std::size_t context_dim_;
  std::size_t num_arms_;
};

// Uniform draw from the unit sphere in R^dim.
std::vector<double> unit_sphere_draw(std::size_t dim, Rng& rng);

struct LoggedRecord {
  std::vector<double> context;
  ActionIndex action = 0;
  double reward = 0.0;
  double logging_prob = 1.0;
};

// i.i.d. records: context ~ env, action ~ logging_rule, reward ~ env. Actions
// use stream 2 of `seed`, disjoint from the policy stream of a replay.
std::vector<LoggedRecord> synth_logged_dataset(const Environment& env,
                                               const DecisionRule& logging_rule,
                                               std::size_t n_records, std::uint64_t seed);

// CSV with header context_0..context_{p-1},action,reward,logging_prob.
void write_logged_csv(std::ostream& out, std::span<const LoggedRecord> records);
// Throws DataError naming the offending line.
std::vector<LoggedRecord> read_logged_csv(std::istream& in);

}  // namespace batchband
