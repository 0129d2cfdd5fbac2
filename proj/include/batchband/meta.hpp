#pragma once

// Delayed-start meta-algorithms: a naive policy plays until a monotone lower
// bound on the probability of choosing the optimal arm certifies that the
// candidate policy can take over.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "batchband/core.hpp"
#include "batchband/environments.hpp"
#include "batchband/policies.hpp"
#include "batchband/specifications.hpp"

namespace batchband {

// Instance-dependent bound from the UCB pull-count bound:
//   f_a(t)   = clamp(4 ln(t+1) / (t Delta_a^2) + 8 / t, 0, 1)  for suboptimal a
//   f(t)     = max(0, 1 - sum_a f_a(t))
// f_a is non-increasing and f non-decreasing in t.
class MonotoneBound {
 public:
  // Throws DegenerateInstanceError when the best arm is not unique.
  static MonotoneBound for_instance(std::span<const double> means);
  static MonotoneBound for_instance(const Instance& theta) {
    return for_instance(theta.theta());
  }

  // f_a(t); zero for the best arm.
  double arm_bound(ActionIndex a, Timestep t) const;
  std::vector<double> per_arm(Timestep t) const;
  double value(Timestep t) const;

  ActionIndex best_arm() const { return best_; }
  std::span<const double> gaps() const { return gaps_; }
  std::size_t num_arms() const { return gaps_.size(); }

 private:
  MonotoneBound(std::vector<double> gaps, ActionIndex best) : gaps_(std::move(gaps)), best_(best) {}
  std::vector<double> gaps_;
  ActionIndex best_;
};

struct BoundValue {
  double f_theta = 0.0;
  std::vector<double> per_arm;
};

BoundValue monotone_bound(const Instance& theta, Timestep t);

// Smallest t in [1, t_max] with f(t) > threshold.
std::optional<Timestep> first_time_above(const std::function<double(Timestep)>& f,
                                         double threshold, Timestep t_max);

// tau_theta = min{t : f_theta(t) > 1/K}, searched over [1, t_max].
std::optional<Timestep> tau_instance(const Instance& theta, std::size_t num_arms, Timestep t_max);

// Learning with delayed start. tau is the first decision epoch (j-1)b + 1
// with f(tau) > 0; `naive` plays before tau and `candidate` from tau on with
// everything revealed so far. Both see the same feedback stream.
RunRecord delayed_start_run(const Policy& candidate, const Policy& naive,
                            const std::function<double(Timestep)>& bound, const Environment& env,
                            const BatchGrid& grid, std::uint64_t seed,
                            Specification spec = Specification::batch,
                            const RunOptions& options = {});

struct CheckPhaseResult {
  bool phase1 = true;
  // Arm with the largest empirical mean (lowest index on ties).
  ActionIndex leader = 0;
  // Confidence half-widths sqrt(ln t / T_j).
  std::vector<double> widths;
  // Leader lowered by its width, every other arm raised by its width.
  std::vector<double> theta_hat;
  // theta_hat keeps the leader as its unique best arm.
  bool ordered = false;
  // f_{theta_hat}(t); zero when theta_hat is not ordered.
  double f_value = 0.0;
  // 2K / t^2.
  double failure_bound = 1.0;
};

// One CheckPhase evaluation at time t from per-arm counts and means. Phase 1
// ends only if f_{theta_hat}(t) > 1/K and 2K/t^2 < delta.
// Throws InsufficientDataError if an arm has no pulls.
CheckPhaseResult check_phase(const ArmStats& stats, Timestep t, std::size_t num_arms,
                             double delta);

// True when every mean lies in [mu_hat - w, mu_hat + w].
bool box_covers(const ArmStats& stats, std::span<const double> widths,
                std::span<const double> truth);

// <theta_hat, a* - a> < <theta*, a* - a> for every suboptimal a.
bool gap_pessimistic(std::span<const double> theta_hat, std::span<const double> truth);

// Approximate learning with delayed start: uniform play, CheckPhase at each
// batch end, candidate takes over after the first certified boundary.
// Stochastic environments only.
RunRecord approx_delayed_start_run(const Policy& candidate, const Environment& env,
                                   const BatchGrid& grid, double delta, std::uint64_t seed,
                                   Specification spec = Specification::batch,
                                   const RunOptions& options = {});

}  // namespace batchband
