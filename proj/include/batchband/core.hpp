#pragma once

// Foundational bandit types: actions, instances, histories, decision rules,
// batch grids, and the expected-value ordering over decision rules.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "batchband/rng.hpp"

namespace batchband {

using ActionIndex = std::size_t;
using Timestep = std::int64_t;

// Tolerance for probability sums and for rule comparisons.
inline constexpr double kRuleTolerance = 1e-12;

// The unknown parameter theta*. For K-armed stochastic bandits this is the
// vector of arm means.
class Instance {
 public:
  Instance() = default;

  // Stochastic instance; means are taken as given.
  static Instance stochastic(std::vector<double> means);
  // Linear instance; requires ||theta||_2 <= 1 + 1e-9.
  static Instance linear(std::vector<double> theta);

  std::size_t dim() const { return theta_.size(); }
  std::span<const double> theta() const { return theta_; }
  double operator[](std::size_t i) const { return theta_[i]; }

  double norm() const;

 private:
  explicit Instance(std::vector<double> theta) : theta_(std::move(theta)) {}
  std::vector<double> theta_;
};

struct HistoryEntry {
  Timestep t = 0;
  ActionIndex action = 0;
  double reward = 0.0;
  // Context observed with the action; empty for non-contextual bandits.
  std::vector<double> context;
};

// Ordered action/reward log plus a cursor marking how much of it the policy
// may observe.
class History {
 public:
  // Appends an entry that is not yet visible. Timesteps must increase.
  void append(HistoryEntry entry);
  // Makes the first `count` entries visible. The cursor never moves back.
  void reveal(std::size_t count);
  void reveal_all() { reveal(entries_.size()); }

  std::size_t size() const { return entries_.size(); }
  std::size_t visible_len() const { return visible_len_; }
  std::span<const HistoryEntry> entries() const { return entries_; }
  std::span<const HistoryEntry> visible() const {
    return std::span<const HistoryEntry>(entries_).first(visible_len_);
  }

 private:
  std::vector<HistoryEntry> entries_;
  std::size_t visible_len_ = 0;
};

// Probability distribution over the K actions available at a timestep.
class DecisionRule {
 public:
  // Validates non-negativity and a unit sum within kRuleTolerance.
  explicit DecisionRule(std::vector<double> probs);

  static DecisionRule point_mass(std::size_t num_actions, ActionIndex action);
  static DecisionRule uniform(std::size_t num_actions);

  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](ActionIndex a) const { return probs_[a]; }

  // Samples an action by inversion; always consumes exactly one uniform draw.
  ActionIndex sample(Rng& rng) const;

  friend bool operator==(const DecisionRule&, const DecisionRule&) = default;

 private:
  struct Unchecked {};
  DecisionRule(std::vector<double> probs, Unchecked) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

// Division of the horizon into M batches of b steps. Batch j (1-based) is
// decided from t = (j-1)b + 1 and its feedback is released after t = jb.
class BatchGrid {
 public:
  Timestep n() const { return n_; }
  Timestep b() const { return b_; }
  Timestep num_batches() const { return n_ / b_; }

  Timestep batch_start(Timestep j) const { return (j - 1) * b_ + 1; }
  Timestep batch_end(Timestep j) const { return j * b_; }
  // True when feedback is released after step t.
  bool is_batch_end(Timestep t) const { return t % b_ == 0; }

 private:
  BatchGrid(Timestep n, Timestep b) : n_(n), b_(b) {}
  Timestep n_;
  Timestep b_;

  friend BatchGrid make_grid(Timestep n_raw, Timestep b);
};

// Truncates the horizon to floor(n_raw / b) * b. Throws InvalidGridError if
// b < 1 or n_raw < b.
BatchGrid make_grid(Timestep n_raw, Timestep b);

// Batch j containing t, i.e. (j-1)b < t <= jb.
Timestep batch_index(Timestep t, const BatchGrid& grid);

// Expected mean reward sum_a theta[a] * pi(a) for a stochastic instance.
double rule_value(const DecisionRule& rule, const Instance& instance);

enum class Ordering { better, equal, worse };

std::string to_string(Ordering ordering);

Ordering compare_rules(const DecisionRule& a, const DecisionRule& b, const Instance& instance);

// Element-wise mean of the given rules.
DecisionRule average_rule(std::span<const DecisionRule> rules);

// Per-arm pull counts and empirical means over a set of entries.
struct ArmStats {
  std::vector<std::size_t> counts;
  std::vector<double> means;
};

ArmStats summarize(std::span<const HistoryEntry> entries, std::size_t num_arms);

// Lowest index among the maxima.
ActionIndex argmax(std::span<const double> values);

}  // namespace batchband
