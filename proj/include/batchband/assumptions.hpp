#pragma once

// Empirical falsification checks for the policy assumptions. Every check is
// statistical: it can report a violation or consistency with the data, never
// a proof.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "batchband/core.hpp"
#include "batchband/environments.hpp"
#include "batchband/meta.hpp"
#include "batchband/policies.hpp"
#include "batchband/stats.hpp"

namespace batchband {

// Mean cumulative regret R_t over repetitions, indexed by t - 1.
struct RegretCurve {
  std::vector<double> values;
  std::vector<double> std_error;
  std::size_t reps = 0;
};

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

// One line of a machine-readable report. NaN fields are written empty.
struct ReportRow {
  std::string check;
  std::string subject;
  Verdict verdict = Verdict::not_evaluated;
  double statistic = kNoValue;
  double ci_low = kNoValue;
  double ci_high = kNoValue;
};

// check,subject,verdict,statistic,ci_low,ci_high
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);
void write_report_text(std::ostream& out, std::span<const ReportRow> rows);

struct SublinearityReport {
  Verdict verdict = Verdict::vacuous;
  std::size_t pairs_checked = 0;
  std::size_t violation_count = 0;
  // The first violating (n1, n2) pairs, at most kMaxListed of them.
  std::vector<std::pair<Timestep, Timestep>> violations;
  static constexpr std::size_t kMaxListed = 1000;

  bool holds() const { return violation_count == 0; }
};

// Relative slack absorbing rounding in accumulated regret.
inline constexpr double kRatioTolerance = 1e-9;

// R_{n1}/n1 > R_{n2}/n2 for all t_min <= n1 < n2 <= n. A pair violates when
// R_{n1}/n1 + z * se <= R_{n2}/n2, with se the pooled standard error of the
// two ratios; with zero standard errors this is the strict inequality.
SublinearityReport check_sublinearity(const RegretCurve& curve, Timestep t_min = 1,
                                      double z = 2.0);

struct PropertyTally {
  Verdict verdict = Verdict::vacuous;
  std::size_t pairs = 0;
  std::size_t equal = 0;
  std::size_t reversed = 0;
};

struct RuleOrderingReport {
  // Average rule improves: avg_{n2} > avg_{n1} for n1 < n2.
  PropertyTally average_improves;
  // Current rule beats the running average: pi_t > avg_t for t >= 2.
  PropertyTally current_beats_average;
};

// Checks both orderings of per-step rules under the instance. Strict
// reversals give `violated`, ties only give `boundary`.
RuleOrderingReport check_rule_orderings(std::span<const DecisionRule> rules, const Instance& instance);

struct NegatedSublinearityReport {
  Verdict verdict = Verdict::not_evaluated;
  Estimate regret_n;   // R_n(pi) with horizon n
  Estimate regret_m;   // R_M(pi) with horizon M = n / b
  double difference = 0.0;  // R_n - b R_M
  double slack = 0.0;       // 2 pooled standard errors
};

// For a policy whose regret rate grows, R_n(pi) > b R_M(pi). Consistent when
// the difference exceeds its 2-sigma slack; boundary for b = 1 or an exact tie.
NegatedSublinearityReport check_negated_sublinearity(const Policy& policy, const Environment& env,
                                                     const BatchGrid& grid, std::size_t reps,
                                                     std::uint64_t master_seed,
                                                     unsigned threads = 0);

struct EnvelopeArmReport {
  ActionIndex arm = 0;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  std::optional<Timestep> first_violation;
  // Largest Wilson lower bound minus f_a(t) over evaluated t.
  double worst_excess = -1.0;
};

struct EnvelopeReport {
  Verdict verdict = Verdict::not_evaluated;
  std::size_t reps = 0;
  Timestep first_evaluated = 0;  // steps before this are the forced pulls
  std::vector<EnvelopeArmReport> arms;
  // Empirical P(A_t = a), t-major: frequency[(t - 1) * K + a].
  std::vector<double> frequency;
};

// Compares the empirical frequency of each suboptimal arm with f_{theta,a}(t)
// from the UCB count bound, using a one-sided 95% Wilson bound. Only UCB has
// a registered bound; other policies raise UnsupportedError.
EnvelopeReport check_monotone_envelope(const Policy& policy, const BernoulliEnv& env,
                                       std::size_t reps, Timestep t_max,
                                       std::uint64_t master_seed, unsigned threads = 0);

// Same comparison against an explicitly supplied bound, for any policy.
EnvelopeReport check_envelope_against(const Policy& policy, const BernoulliEnv& env,
                                      const MonotoneBound& bound, std::size_t reps,
                                      Timestep t_max, Timestep first_evaluated,
                                      std::uint64_t master_seed, unsigned threads = 0);

struct InformativenessReport {
  Verdict verdict = Verdict::not_evaluated;
  double mean_more = 0.0;  // mean rule value after the history with more optimal pulls
  double mean_less = 0.0;
  double difference = 0.0;
  double std_error = 0.0;
};

// Builds paired histories of length t with `more` and `less` optimal pulls
// (rewards resampled from the true arms, order shuffled), feeds each to a
// fresh copy of the policy and compares the next rule's value.
InformativenessReport probe_informativeness(const Policy& policy, const BernoulliEnv& env,
                                            Timestep t, std::size_t more, std::size_t less,
                                            std::size_t reps, std::uint64_t master_seed);

}  // namespace batchband
