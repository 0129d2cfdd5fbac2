#pragma once

// Online, batch and "short" online specifications of a policy. They differ
// only in which rewards reach the policy and when.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "batchband/core.hpp"
#include "batchband/environments.hpp"
#include "batchband/policies.hpp"

namespace batchband {

enum class Specification {
  online,  // every reward is visible right after its step
  batch,   // the b rewards of a batch are revealed together after it ends
  short_,  // only the first reward of each batch is revealed after it ends
};

std::string to_string(Specification spec);
// Accepts "online", "batch", "short".
Specification parse_specification(std::string_view text);

// Phase boundary of the delayed-start meta-algorithms.
struct PhaseAnnotation {
  // Delayed start: first step played by the candidate. Approximate delayed
  // start: the batch end at which CheckPhase certified the switch, the
  // candidate plays from tau + 1. Empty when phase 1 never ended.
  std::optional<Timestep> tau;
  // CheckPhase inputs and pessimistic instance at tau (approximate delayed
  // start only).
  std::vector<std::size_t> counts;
  std::vector<double> means;
  std::vector<double> widths;
  std::vector<double> theta_hat;
  // Number of CheckPhase evaluations performed.
  std::size_t checks = 0;
};

struct RunRecord {
  Specification spec = Specification::online;
  std::string policy;
  std::string env;
  Timestep n = 0;
  Timestep b = 1;
  std::uint64_t seed = 0;

  std::vector<ActionIndex> actions;
  // Cumulative sum of Delta_{A_s} for s <= t, indexed by t - 1.
  std::vector<double> pseudo_regret;
  // Cumulative number of optimal pulls, indexed by t - 1.
  std::vector<Timestep> optimal_hits;
  std::vector<std::size_t> pull_counts;

  // Filled only when requested through RunOptions.
  std::vector<std::size_t> visible_len;
  std::vector<DecisionRule> rules;

  std::optional<PhaseAnnotation> phase;

  double final_regret() const { return pseudo_regret.empty() ? 0.0 : pseudo_regret.back(); }
  Timestep optimal_pulls() const { return optimal_hits.empty() ? 0 : optimal_hits.back(); }
};

struct RunOptions {
  // Record the number of visible entries at each decision.
  bool record_visibility = false;
  // Record the decision rule used at each step.
  bool record_rules = false;
};

// Decides which policy acts at each step and receives revealed feedback.
// Plain runs use a single policy; the meta-algorithms switch between two.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual Policy& actor(Timestep t) = 0;
  virtual void observe(std::span<const HistoryEntry> revealed) = 0;
  // Called at every batch end, after that batch's feedback was revealed.
  virtual void on_batch_end(Timestep, std::span<const HistoryEntry> /*visible*/) {}
  virtual std::string name() const = 0;
  virtual std::optional<PhaseAnnotation> phase() const { return std::nullopt; }
};

// Core trajectory loop. Environment draws use stream 0 of `seed` and policy
// draws stream 1, so trajectories replay exactly.
RunRecord run_controlled(Controller& controller, const Environment& env, const BatchGrid& grid,
                         Specification spec, std::uint64_t seed, const RunOptions& options = {});

RunRecord run_specification(const Policy& policy, const Environment& env, const BatchGrid& grid,
                            Specification spec, std::uint64_t seed,
                            const RunOptions& options = {});

RunRecord run_online(const Policy& policy, const Environment& env, Timestep n, std::uint64_t seed,
                     const RunOptions& options = {});
RunRecord run_batch(const Policy& policy, const Environment& env, const BatchGrid& grid,
                    std::uint64_t seed, const RunOptions& options = {});
RunRecord run_short(const Policy& policy, const Environment& env, const BatchGrid& grid,
                    std::uint64_t seed, const RunOptions& options = {});

// Rows of spec,policy,env,n,b,seed,final_regret,optimal_pulls.
void write_run_records_csv(std::ostream& out, std::span<const RunRecord> records);

}  // namespace batchband
