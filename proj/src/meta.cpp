#include "batchband/meta.hpp"

#include <algorithm>
#include <cmath>

#include "batchband/error.hpp"

namespace batchband {

MonotoneBound MonotoneBound::for_instance(std::span<const double> means) {
  if (means.size() < 2) throw DegenerateInstanceError("instance needs at least two arms");
  const ActionIndex best = argmax(means);
  std::vector<double> gaps(means.size());
  for (std::size_t a = 0; a < means.size(); ++a) {
    gaps[a] = means[best] - means[a];
    if (a != best && !(gaps[a] > 0.0)) {
      throw DegenerateInstanceError("instance has no unique best arm");
    }
  }
  return MonotoneBound(std::move(gaps), best);
}

double MonotoneBound::arm_bound(ActionIndex a, Timestep t) const {
  if (t < 1) throw InvalidArgumentError("monotone bound is defined for t >= 1");
  if (a == best_) return 0.0;
  const double td = static_cast<double>(t);
  const double gap = gaps_[a];
  const double raw = 4.0 * std::log(td + 1.0) / (td * gap * gap) + 8.0 / td;
  return std::clamp(raw, 0.0, 1.0);
}

std::vector<double> MonotoneBound::per_arm(Timestep t) const {
  std::vector<double> out(gaps_.size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = arm_bound(a, t);
  return out;
}

double MonotoneBound::value(Timestep t) const {
  double sum = 0.0;
  for (std::size_t a = 0; a < gaps_.size(); ++a) sum += arm_bound(a, t);
  return std::max(0.0, 1.0 - sum);
}

BoundValue monotone_bound(const Instance& theta, Timestep t) {
  const auto bound = MonotoneBound::for_instance(theta);
  return BoundValue{bound.value(t), bound.per_arm(t)};
}

std::optional<Timestep> first_time_above(const std::function<double(Timestep)>& f,
                                         double threshold, Timestep t_max) {
  if (t_max < 1) throw InvalidArgumentError("t_max must be at least 1");
  for (Timestep t = 1; t <= t_max; ++t) {
    if (f(t) > threshold) return t;
  }
  return std::nullopt;
}

std::optional<Timestep> tau_instance(const Instance& theta, std::size_t num_arms, Timestep t_max) {
  if (num_arms != theta.dim()) throw DimensionMismatchError("K does not match the instance");
  const auto bound = MonotoneBound::for_instance(theta);
  return first_time_above([&](Timestep t) { return bound.value(t); },
                          1.0 / static_cast<double>(num_arms), t_max);
}

namespace {

class DelayedStart final : public Controller {
 public:
  DelayedStart(const Policy& candidate, const Policy& naive, std::optional<Timestep> tau)
      : candidate_(candidate.clone()), naive_(naive.clone()), tau_(tau) {}

  Policy& actor(Timestep t) override {
    return (tau_ && t >= *tau_) ? *candidate_ : *naive_;
  }
  void observe(std::span<const HistoryEntry> revealed) override {
    candidate_->update(revealed);
    naive_->update(revealed);
  }
  std::string name() const override { return candidate_->name(); }
  std::optional<PhaseAnnotation> phase() const override {
    PhaseAnnotation annotation;
    annotation.tau = tau_;
    return annotation;
  }

 private:
  std::unique_ptr<Policy> candidate_;
  std::unique_ptr<Policy> naive_;
  std::optional<Timestep> tau_;
};

class ApproxDelayedStart final : public Controller {
 public:
  ApproxDelayedStart(const Policy& candidate, std::size_t num_arms, double delta)
      : candidate_(candidate.clone()),
        naive_(uniform_policy(num_arms)),
        delta_(delta),
        counts_(num_arms, 0),
        sums_(num_arms, 0.0) {}

  Policy& actor(Timestep) override { return phase1_ ? naive_ : *candidate_; }

  void observe(std::span<const HistoryEntry> revealed) override {
    candidate_->update(revealed);
    naive_.update(revealed);
    for (const auto& e : revealed) {
      ++counts_[e.action];
      sums_[e.action] += e.reward;
    }
  }

  void on_batch_end(Timestep t, std::span<const HistoryEntry>) override {
    if (!phase1_ || t < 2) return;
    if (std::any_of(counts_.begin(), counts_.end(), [](std::size_t c) { return c == 0; })) return;
    ArmStats stats{counts_, std::vector<double>(counts_.size())};
    for (std::size_t a = 0; a < counts_.size(); ++a) {
      stats.means[a] = sums_[a] / static_cast<double>(counts_[a]);
    }
    ++annotation_.checks;
    const auto result = check_phase(stats, t, counts_.size(), delta_);
    if (result.phase1) return;
    phase1_ = false;
    annotation_.tau = t;
    annotation_.counts = stats.counts;
    annotation_.means = stats.means;
    annotation_.widths = result.widths;
    annotation_.theta_hat = result.theta_hat;
  }

  std::string name() const override { return candidate_->name(); }
  std::optional<PhaseAnnotation> phase() const override { return annotation_; }

 private:
  std::unique_ptr<Policy> candidate_;
  FixedRulePolicy naive_;
  double delta_;
  bool phase1_ = true;
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
  PhaseAnnotation annotation_;
};

}  // namespace

RunRecord delayed_start_run(const Policy& candidate, const Policy& naive,
                            const std::function<double(Timestep)>& bound, const Environment& env,
                            const BatchGrid& grid, std::uint64_t seed, Specification spec,
                            const RunOptions& options) {
  std::optional<Timestep> tau;
  for (Timestep j = 1; j <= grid.num_batches(); ++j) {
    if (bound(grid.batch_start(j)) > 0.0) {
      tau = grid.batch_start(j);
      break;
    }
  }
  DelayedStart controller(candidate, naive, tau);
  return run_controlled(controller, env, grid, spec, seed, options);
}

CheckPhaseResult check_phase(const ArmStats& stats, Timestep t, std::size_t num_arms,
                             double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgumentError("delta must lie in (0, 1)");
  if (t < 2) throw InvalidArgumentError("CheckPhase needs t >= 2");
  if (stats.counts.size() != num_arms || stats.means.size() != num_arms) {
    throw DimensionMismatchError("arm statistics do not match K");
  }
  for (std::size_t a = 0; a < num_arms; ++a) {
    if (stats.counts[a] == 0) {
      throw InsufficientDataError("arm " + std::to_string(a) + " has not been pulled");
    }
  }

  CheckPhaseResult result;
  result.leader = argmax(stats.means);
  const double log_t = std::log(static_cast<double>(t));
  result.widths.resize(num_arms);
  result.theta_hat.resize(num_arms);
  for (std::size_t a = 0; a < num_arms; ++a) {
    result.widths[a] = std::sqrt(log_t / static_cast<double>(stats.counts[a]));
    result.theta_hat[a] = a == result.leader ? stats.means[a] - result.widths[a]
                                             : stats.means[a] + result.widths[a];
  }

  result.ordered = true;
  for (std::size_t a = 0; a < num_arms; ++a) {
    if (a != result.leader && result.theta_hat[a] >= result.theta_hat[result.leader]) {
      result.ordered = false;
    }
  }
  const double td = static_cast<double>(t);
  result.failure_bound = 2.0 * static_cast<double>(num_arms) / (td * td);
  if (result.ordered) {
    result.f_value = MonotoneBound::for_instance(result.theta_hat).value(t);
  }
  const bool certified = result.ordered &&
                         result.f_value > 1.0 / static_cast<double>(num_arms) &&
                         result.failure_bound < delta;
  result.phase1 = !certified;
  return result;
}

bool box_covers(const ArmStats& stats, std::span<const double> widths,
                std::span<const double> truth) {
  for (std::size_t a = 0; a < truth.size(); ++a) {
    if (truth[a] < stats.means[a] - widths[a] || truth[a] > stats.means[a] + widths[a]) {
      return false;
    }
  }
  return true;
}

bool gap_pessimistic(std::span<const double> theta_hat, std::span<const double> truth) {
  const ActionIndex best = argmax(truth);
  for (std::size_t a = 0; a < truth.size(); ++a) {
    if (a == best) continue;
    if (!(theta_hat[best] - theta_hat[a] < truth[best] - truth[a])) return false;
  }
  return true;
}

RunRecord approx_delayed_start_run(const Policy& candidate, const Environment& env,
                                   const BatchGrid& grid, double delta, std::uint64_t seed,
                                   Specification spec, const RunOptions& options) {
  if (env.context_dim() != 0) {
    throw UnsupportedError("approximate delayed start needs a stochastic (non-contextual) bandit");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgumentError("delta must lie in (0, 1)");
  ApproxDelayedStart controller(candidate, env.num_arms(), delta);
  return run_controlled(controller, env, grid, spec, seed, options);
}

}  // namespace batchband
