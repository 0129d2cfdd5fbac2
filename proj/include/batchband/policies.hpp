#pragma once

// Candidate policies. Each policy keeps sufficient statistics of the history
// it has been shown and maps them to a decision rule.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "batchband/core.hpp"
#include "batchband/environments.hpp"
#include "batchband/rng.hpp"

namespace batchband {

// What a policy is told about the round it has to act in.
struct Round {
  Timestep t = 1;
  // Context of the round; empty for non-contextual bandits.
  std::span<const double> context = {};
};

class Policy {
 public:
  explicit Policy(std::size_t num_arms);
  virtual ~Policy() = default;

  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual std::string name() const = 0;

  // Randomized policies draw from `rng`; deterministic ones never touch it.
  virtual DecisionRule decide(const Round& round, Rng& rng) const = 0;
  virtual bool randomized() const { return false; }

  // Folds newly visible entries into the statistics. The result does not
  // depend on how entries are grouped into calls.
  void update(std::span<const HistoryEntry> entries);
  void update(const HistoryEntry& entry) { update(std::span<const HistoryEntry>(&entry, 1)); }

  std::size_t num_arms() const { return num_arms_; }
  // Number of observations folded in so far.
  Timestep observations() const { return observations_; }

 protected:
  Policy(const Policy&) = default;
  Policy& operator=(const Policy&) = default;

  virtual void absorb(std::span<const HistoryEntry> entries) = 0;

 private:
  std::size_t num_arms_;
  Timestep observations_ = 0;
};

// UCB with index mu_hat + sqrt(c ln s / T_a), where s is the number of
// observations plus one. Every arm is pulled once first, lowest index first.
// The rule is constant while the visible history is.
class UcbPolicy final : public Policy {
 public:
  explicit UcbPolicy(std::size_t num_arms, double c = 2.0);

  std::unique_ptr<Policy> clone() const override { return std::make_unique<UcbPolicy>(*this); }
  std::string name() const override { return "ucb"; }
  DecisionRule decide(const Round& round, Rng& rng) const override;

  std::vector<double> indices() const;
  std::span<const std::size_t> counts() const { return counts_; }
  std::vector<double> means() const;

 protected:
  void absorb(std::span<const HistoryEntry> entries) override;

 private:
  double c_;
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
};

// Beta-Bernoulli Thompson sampling, prior Beta(1, 1). Rewards in [0, 1] add
// r to alpha and 1 - r to beta.
class ThompsonBetaPolicy final : public Policy {
 public:
  explicit ThompsonBetaPolicy(std::size_t num_arms);
  ThompsonBetaPolicy(std::vector<double> alpha, std::vector<double> beta);

  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<ThompsonBetaPolicy>(*this);
  }
  std::string name() const override { return "ts"; }
  DecisionRule decide(const Round& round, Rng& rng) const override;
  bool randomized() const override { return true; }

  std::span<const double> alpha() const { return alpha_; }
  std::span<const double> beta() const { return beta_; }

 protected:
  void absorb(std::span<const HistoryEntry> entries) override;

 private:
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

// Ridge model over the block one-hot features psi(c, i) in R^{pK}:
// V = lambda I + sum psi psi^T, z = sum psi X. Non-contextual rounds use the
// constant context (1), so p = 1 recovers an independent model per arm.
class LinearModelPolicy : public Policy {
 public:
  LinearModelPolicy(std::size_t num_arms, std::size_t context_dim, double ridge_lambda);

  const Eigen::MatrixXd& design_matrix() const { return design_; }
  const Eigen::VectorXd& response() const { return response_; }
  const Eigen::VectorXd& estimate() const { return estimate_; }
  std::size_t context_dim() const { return context_dim_; }

 protected:
  void absorb(std::span<const HistoryEntry> entries) override;
  Eigen::VectorXd features(std::span<const double> context, ActionIndex arm) const;

  Eigen::LLT<Eigen::MatrixXd> factor_;

 private:
  std::size_t context_dim_;
  Eigen::MatrixXd design_;
  Eigen::VectorXd response_;
  Eigen::VectorXd estimate_;
};

// LinUCB: <theta_hat, psi> + alpha * sqrt(psi^T V^{-1} psi).
class LinUcbPolicy final : public LinearModelPolicy {
 public:
  LinUcbPolicy(std::size_t num_arms, std::size_t context_dim, double ridge_lambda = 1.0,
               double alpha = 1.0);

  std::unique_ptr<Policy> clone() const override { return std::make_unique<LinUcbPolicy>(*this); }
  std::string name() const override { return "linucb"; }
  DecisionRule decide(const Round& round, Rng& rng) const override;

 private:
  double alpha_;
};

// Linear Thompson sampling: theta ~ N(V^{-1} z, V^{-1}).
class LinTsPolicy final : public LinearModelPolicy {
 public:
  LinTsPolicy(std::size_t num_arms, std::size_t context_dim, double ridge_lambda = 1.0);

  std::unique_ptr<Policy> clone() const override { return std::make_unique<LinTsPolicy>(*this); }
  std::string name() const override { return "lints"; }
  DecisionRule decide(const Round& round, Rng& rng) const override;
  bool randomized() const override { return true; }
};

// History-independent policy returning one fixed rule.
class FixedRulePolicy final : public Policy {
 public:
  FixedRulePolicy(DecisionRule rule, std::string name);

  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<FixedRulePolicy>(*this);
  }
  std::string name() const override { return name_; }
  DecisionRule decide(const Round&, Rng&) const override { return rule_; }

 protected:
  void absorb(std::span<const HistoryEntry>) override {}

 private:
  DecisionRule rule_;
  std::string name_;
};

// The naive policy: uniform over K arms whatever the history.
FixedRulePolicy uniform_policy(std::size_t num_arms);

// Plays `good` for t <= switch_after and `bad` afterwards. Its regret rate
// grows over time, so it violates sublinearity by construction.
class TwoPhasePolicy final : public Policy {
 public:
  TwoPhasePolicy(std::size_t num_arms, ActionIndex good, ActionIndex bad, Timestep switch_after);

  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<TwoPhasePolicy>(*this);
  }
  std::string name() const override { return "two_phase"; }
  DecisionRule decide(const Round& round, Rng& rng) const override;

  Timestep switch_after() const { return switch_after_; }

 protected:
  void absorb(std::span<const HistoryEntry>) override {}

 private:
  ActionIndex good_;
  ActionIndex bad_;
  Timestep switch_after_;
};

struct PolicyConfig {
  std::string name = "ucb";
  double ucb_c = 2.0;
  double ridge_lambda = 1.0;
  double linucb_alpha = 1.0;
};

// ucb, ts, linucb, lints, uniform, plus the reference policies best, worst
// and two_phase (best arm for t <= horizon/2, worst arm afterwards).
std::vector<std::string> policy_names();

// Learning policies and uniform only; these need no knowledge of the
// environment beyond K and the context dimension.
std::unique_ptr<Policy> make_learning_policy(const PolicyConfig& config, std::size_t num_arms,
                                             std::size_t context_dim);

// Throws ConfigError for unknown names or unsupported pairings.
std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const Environment& env,
                                    Timestep horizon);

}  // namespace batchband
