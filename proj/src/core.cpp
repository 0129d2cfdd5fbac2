#include "batchband/core.hpp"

#include <cmath>
#include <numeric>

#include "batchband/error.hpp"

namespace batchband {

Instance Instance::stochastic(std::vector<double> means) {
  if (means.empty()) throw InvalidArgumentError("instance must have at least one component");
  return Instance(std::move(means));
}

Instance Instance::linear(std::vector<double> theta) {
  if (theta.empty()) throw InvalidArgumentError("instance must have at least one component");
  Instance instance(std::move(theta));
  if (instance.norm() > 1.0 + 1e-9) {
    throw InvalidArgumentError("linear instance must satisfy ||theta||_2 <= 1, got " +
                               std::to_string(instance.norm()));
  }
  return instance;
}

double Instance::norm() const {
  double s = 0.0;
  for (double v : theta_) s += v * v;
  return std::sqrt(s);
}

void History::append(HistoryEntry entry) {
  if (!entries_.empty() && entry.t <= entries_.back().t) {
    throw InvalidArgumentError("history timesteps must be strictly increasing");
  }
  entries_.push_back(std::move(entry));
}

void History::reveal(std::size_t count) {
  if (count > entries_.size()) throw InvalidArgumentError("cannot reveal beyond the history");
  if (count > visible_len_) visible_len_ = count;
}

DecisionRule::DecisionRule(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgumentError("decision rule over an empty action set");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InvalidArgumentError("decision rule has a negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRuleTolerance) {
    throw InvalidArgumentError("decision rule does not sum to 1");
  }
}

DecisionRule DecisionRule::point_mass(std::size_t num_actions, ActionIndex action) {
  if (action >= num_actions) throw InvalidArgumentError("point mass on an out-of-range action");
  std::vector<double> p(num_actions, 0.0);
  p[action] = 1.0;
  return DecisionRule(std::move(p), Unchecked{});
}

DecisionRule DecisionRule::uniform(std::size_t num_actions) {
  if (num_actions == 0) throw InvalidArgumentError("uniform rule over an empty action set");
  return DecisionRule(std::vector<double>(num_actions, 1.0 / static_cast<double>(num_actions)),
                      Unchecked{});
}

ActionIndex DecisionRule::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  ActionIndex last = 0;
  for (ActionIndex a = 0; a < probs_.size(); ++a) {
    if (probs_[a] <= 0.0) continue;
    acc += probs_[a];
    last = a;
    if (u < acc) return a;
  }
  return last;
}

BatchGrid make_grid(Timestep n_raw, Timestep b) {
  if (b < 1) throw InvalidGridError("batch size must be at least 1");
  if (n_raw < b) {
    throw InvalidGridError("horizon " + std::to_string(n_raw) + " is shorter than batch size " +
                           std::to_string(b));
  }
  return BatchGrid((n_raw / b) * b, b);
}

Timestep batch_index(Timestep t, const BatchGrid& grid) {
  if (t < 1 || t > grid.n()) {
    throw InvalidArgumentError("timestep " + std::to_string(t) + " outside [1, " +
                               std::to_string(grid.n()) + "]");
  }
  return (t - 1) / grid.b() + 1;
}

double rule_value(const DecisionRule& rule, const Instance& instance) {
  if (rule.size() != instance.dim()) {
    throw DimensionMismatchError("rule has " + std::to_string(rule.size()) +
                                 " actions but instance has dimension " +
                                 std::to_string(instance.dim()));
  }
  double v = 0.0;
  for (std::size_t a = 0; a < rule.size(); ++a) v += instance[a] * rule[a];
  return v;
}

std::string to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::better: return "better";
    case Ordering::equal: return "equal";
    case Ordering::worse: return "worse";
  }
  return "unknown";
}

Ordering compare_rules(const DecisionRule& a, const DecisionRule& b, const Instance& instance) {
  if (a.size() != b.size()) throw DimensionMismatchError("rules have different dimensions");
  const double diff = rule_value(a, instance) - rule_value(b, instance);
  if (diff > kRuleTolerance) return Ordering::better;
  if (diff < -kRuleTolerance) return Ordering::worse;
  return Ordering::equal;
}

DecisionRule average_rule(std::span<const DecisionRule> rules) {
  if (rules.empty()) throw InvalidArgumentError("cannot average an empty list of rules");
  const std::size_t k = rules.front().size();
  std::vector<double> mean(k, 0.0);
  for (const auto& r : rules) {
    if (r.size() != k) throw DimensionMismatchError("rules have different dimensions");
    for (std::size_t a = 0; a < k; ++a) mean[a] += r[a];
  }
  const double total = std::accumulate(mean.begin(), mean.end(), 0.0);
  for (double& m : mean) m /= total;
  return DecisionRule(std::move(mean));
}

ArmStats summarize(std::span<const HistoryEntry> entries, std::size_t num_arms) {
  ArmStats stats{std::vector<std::size_t>(num_arms, 0), std::vector<double>(num_arms, 0.0)};
  std::vector<double> sums(num_arms, 0.0);
  for (const auto& e : entries) {
    if (e.action >= num_arms) throw InvalidArgumentError("history entry with out-of-range action");
    ++stats.counts[e.action];
    sums[e.action] += e.reward;
  }
  for (std::size_t a = 0; a < num_arms; ++a) {
    if (stats.counts[a] > 0) stats.means[a] = sums[a] / static_cast<double>(stats.counts[a]);
  }
  return stats;
}

ActionIndex argmax(std::span<const double> values) {
  ActionIndex best = 0;
  for (ActionIndex i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace batchband
