#pragma once

// Monte-Carlo experiment runner: regret tables over env x policy x batch
// size, the sandwich-bound checker, and CSV serialization.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "batchband/assumptions.hpp"
#include "batchband/core.hpp"
#include "batchband/environments.hpp"
#include "batchband/policies.hpp"
#include "batchband/specifications.hpp"
#include "batchband/stats.hpp"

namespace batchband {

enum class Mode { plain, delayed_start, approx_delayed_start };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view text);

// Switching bound used by the delayed-start mode.
//   instance: f_theta*(t) > 0
//   oracle:   f_theta*(t) > 1/K, i.e. the switch happens at tau_theta
enum class BoundKind { instance, oracle };

std::string to_string(BoundKind kind);
BoundKind parse_bound(std::string_view text);

struct ExperimentConfig {
  // Preset names or inline means such as "0.9/0.1".
  std::vector<std::string> envs = {"env1"};
  std::vector<std::string> policies = {"ucb"};
  // Hyperparameters shared by all policies; the name field is ignored.
  PolicyConfig params;
  Timestep n = 2000;
  std::vector<Timestep> batch_sizes = {1, 2, 4, 8, 16, 32, 64};
  std::size_t reps = 500;
  std::uint64_t master_seed = 0;
  Mode mode = Mode::plain;
  double delta = 0.01;
  BoundKind bound = BoundKind::instance;
  Specification spec = Specification::batch;
  // 0 selects default_threads().
  unsigned threads = 0;

  // Throws ConfigError on the first invalid field, before anything runs.
  void validate() const;
};

struct RegretRow {
  std::string env;
  std::string policy;
  Specification spec = Specification::batch;
  Mode mode = Mode::plain;
  Timestep b = 1;
  Timestep n = 0;  // effective horizon after truncation
  std::size_t reps = 0;
  std::string cell;  // key used for seed derivation
  std::uint64_t master_seed = 0;

  double mean_regret = 0.0;
  double se_regret = 0.0;
  double optimal_fraction = 0.0;
  // E[T_a(n)] and Delta_a.
  std::vector<double> mean_pulls;
  std::vector<double> gaps;

  // Delayed-start modes: statistics of tau over runs that switched.
  std::optional<double> tau_mean;
  std::optional<double> tau_sd;
  double switch_rate = 0.0;

  std::vector<double> curve_mean;
  std::vector<double> curve_se;

  // Per repetition, in repetition order.
  std::vector<double> final_regret;
  std::vector<Timestep> optimal_pulls;
  std::vector<std::optional<Timestep>> tau;
};

struct RegretTable {
  std::vector<RegretRow> rows;

  // Throws InvalidArgumentError when the cell is absent.
  const RegretRow& at(std::string_view env, std::string_view policy, Timestep b) const;
};

std::string cell_key(std::string_view env, std::string_view policy, Specification spec, Mode mode,
                     Timestep b, Timestep n);

RegretTable run_experiment(const ExperimentConfig& config);

// env,policy,spec,mode,b,n,reps,mean_regret,stderr,optimal_fraction,
// tau_hat_mean,tau_hat_sd,switch_rate
void write_results_csv(std::ostream& out, const RegretTable& table);
// cell,t,mean,stderr
void write_curves_csv(std::ostream& out, const RegretTable& table);
// cell,rep,seed,final_regret,optimal_pulls,tau_hat
void write_runs_csv(std::ostream& out, const RegretTable& table);

struct BoundReport {
  std::string policy;
  std::string env;
  Timestep n = 0;
  Timestep b = 0;
  Timestep m = 0;
  std::size_t reps = 0;

  Estimate online;        // R_n(pi)
  Estimate batch;         // R_n(pi^b)
  Estimate scaled_short;  // b * R_M(pi) from horizon-M online runs
  Estimate short_spec;    // R_n(pi') from the short specification, informational

  // R_n(pi) <= R_n(pi^b), gated.
  Verdict lower = Verdict::not_evaluated;
  // R_n(pi) < R_n(pi^b), reported only.
  Verdict strict_lower = Verdict::not_evaluated;
  // R_n(pi^b) <= b R_M(pi), gated.
  Verdict upper = Verdict::not_evaluated;

  bool gated_ok() const { return lower == Verdict::holds && upper == Verdict::holds; }
  std::vector<ReportRow> rows() const;
};

// Requires b >= 2. Each quantity uses its own seed family.
BoundReport check_regret_bounds(const Policy& policy, const Environment& env, Timestep n,
                                 Timestep b, std::size_t reps, std::uint64_t master_seed,
                                 unsigned threads = 0);

RegretCurve regret_curve(const Policy& policy, const Environment& env, Specification spec,
                         const BatchGrid& grid, std::size_t reps, std::uint64_t master_seed,
                         unsigned threads = 0);

}  // namespace batchband
