#include "batchband/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "batchband/csv.hpp"
#include "batchband/error.hpp"
#include "batchband/montecarlo.hpp"
#include "batchband/parallel.hpp"
#include "batchband/specifications.hpp"

namespace batchband {

namespace {

std::string optional_number(double v) { return std::isnan(v) ? "" : format_double(v); }

}  // namespace

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << "check,subject,verdict,statistic,ci_low,ci_high\n";
  for (const auto& r : rows) {
    out << r.check << ',' << r.subject << ',' << to_string(r.verdict) << ','
        << optional_number(r.statistic) << ',' << optional_number(r.ci_low) << ','
        << optional_number(r.ci_high) << '\n';
  }
}

void write_report_text(std::ostream& out, std::span<const ReportRow> rows) {
  for (const auto& r : rows) {
    out << r.check << " [" << r.subject << "]: " << to_string(r.verdict);
    if (!std::isnan(r.statistic)) out << "  statistic " << format_double(r.statistic);
    if (!std::isnan(r.ci_low)) {
      out << "  interval [" << format_double(r.ci_low) << ", " << format_double(r.ci_high) << "]";
    }
    out << '\n';
  }
}

SublinearityReport check_sublinearity(const RegretCurve& curve, Timestep t_min, double z) {
  const std::size_t n = curve.values.size();
  if (n < 2) throw InvalidArgumentError("sublinearity needs a curve of length >= 2");
  if (!curve.std_error.empty() && curve.std_error.size() != n) {
    throw DimensionMismatchError("curve values and standard errors differ in length");
  }
  if (t_min < 1) throw InvalidArgumentError("t_min must be at least 1");

  std::vector<double> ratio(n);
  std::vector<double> ratio_se(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    ratio[i] = curve.values[i] / t;
    if (!curve.std_error.empty()) ratio_se[i] = curve.std_error[i] / t;
  }

  SublinearityReport report;
  for (std::size_t i = static_cast<std::size_t>(t_min - 1); i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++report.pairs_checked;
      const double slack = z * pooled_se(ratio_se[i], ratio_se[j]);
      const double tol = kRatioTolerance * std::max(1.0, std::abs(ratio[j]));
      if (ratio[i] + slack <= ratio[j] + tol) {
        ++report.violation_count;
        if (report.violations.size() < SublinearityReport::kMaxListed) {
          report.violations.emplace_back(static_cast<Timestep>(i + 1),
                                         static_cast<Timestep>(j + 1));
        }
      }
    }
  }
  if (report.pairs_checked == 0) {
    report.verdict = Verdict::vacuous;
  } else {
    report.verdict = report.violation_count > 0 ? Verdict::violated : Verdict::consistent;
  }
  return report;
}

namespace {

void tally(PropertyTally& p, double better, double worse) {
  ++p.pairs;
  const double d = better - worse;
  if (d > kRuleTolerance) return;
  if (d < -kRuleTolerance) {
    ++p.reversed;
  } else {
    ++p.equal;
  }
}

void finish(PropertyTally& p) {
  if (p.pairs == 0) {
    p.verdict = Verdict::vacuous;
  } else if (p.reversed > 0) {
    p.verdict = Verdict::violated;
  } else if (p.equal > 0) {
    p.verdict = Verdict::boundary;
  } else {
    p.verdict = Verdict::consistent;
  }
}

}  // namespace

RuleOrderingReport check_rule_orderings(std::span<const DecisionRule> rules, const Instance& instance) {
  // rule_value is linear, so the value of the average rule is the average value.
  std::vector<double> value(rules.size());
  std::vector<double> average(rules.size());
  double running = 0.0;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    value[i] = rule_value(rules[i], instance);
    running += value[i];
    average[i] = running / static_cast<double>(i + 1);
  }

  RuleOrderingReport report;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      tally(report.average_improves, average[j], average[i]);
    }
  }
  for (std::size_t i = 1; i < rules.size(); ++i) {
    tally(report.current_beats_average, value[i], average[i]);
  }
  finish(report.average_improves);
  finish(report.current_beats_average);
  return report;
}

NegatedSublinearityReport check_negated_sublinearity(const Policy& policy, const Environment& env,
                                                     const BatchGrid& grid, std::size_t reps,
                                                     std::uint64_t master_seed, unsigned threads) {
  if (reps == 0) throw InvalidArgumentError("reps must be at least 1");
  const Timestep b = grid.b();
  const Timestep m = grid.num_batches();
  const auto full = final_regrets(policy, env, make_grid(grid.n(), 1), Specification::online, reps,
                                  master_seed, "negated;horizon=n", threads);
  const auto shortened = final_regrets(policy, env, make_grid(m, 1), Specification::online, reps,
                                       master_seed, "negated;horizon=m", threads);

  NegatedSublinearityReport report;
  report.regret_n = estimate(full);
  report.regret_m = estimate(shortened);
  const double bd = static_cast<double>(b);
  report.difference = report.regret_n.mean - bd * report.regret_m.mean;
  report.slack = 2.0 * pooled_se(report.regret_n.se, bd * report.regret_m.se);
  const double tol = kRatioTolerance * std::max(1.0, std::abs(report.regret_n.mean));
  if (b == 1 || (std::abs(report.difference) <= tol && report.slack <= tol)) {
    report.verdict = Verdict::boundary;
  } else if (report.difference > report.slack) {
    report.verdict = Verdict::consistent;
  } else if (report.difference < -report.slack) {
    report.verdict = Verdict::violated;
  } else {
    report.verdict = Verdict::inconclusive;
  }
  return report;
}

EnvelopeReport check_envelope_against(const Policy& policy, const BernoulliEnv& env,
                                      const MonotoneBound& bound, std::size_t reps,
                                      Timestep t_max, Timestep first_evaluated,
                                      std::uint64_t master_seed, unsigned threads) {
  if (reps == 0) throw InvalidArgumentError("reps must be at least 1");
  if (t_max < 1) throw InvalidArgumentError("t_max must be at least 1");
  const std::size_t k = env.num_arms();
  if (bound.num_arms() != k) throw DimensionMismatchError("bound does not match the environment");
  const auto steps = static_cast<std::size_t>(t_max);
  const BatchGrid grid = make_grid(t_max, 1);
  const std::string key = "envelope;policy=" + policy.name() + ";env=" + env.name();

  const auto chunks = parallel_map(num_chunks(reps), threads, [&](std::size_t c) {
    std::vector<std::uint32_t> counts(steps * k, 0);
    const std::size_t end = std::min(reps, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      const auto run = run_specification(policy, env, grid, Specification::online,
                                         derive_seed(master_seed, key, i));
      for (std::size_t t = 0; t < steps; ++t) ++counts[t * k + run.actions[t]];
    }
    return counts;
  });
  std::vector<std::size_t> counts(steps * k, 0);
  for (const auto& chunk : chunks) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += chunk[i];
  }

  EnvelopeReport report;
  report.reps = reps;
  report.first_evaluated = std::max<Timestep>(first_evaluated, 1);
  report.frequency.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    report.frequency[i] = static_cast<double>(counts[i]) / static_cast<double>(reps);
  }
  for (ActionIndex a = 0; a < k; ++a) {
    if (a == bound.best_arm()) continue;
    EnvelopeArmReport arm;
    arm.arm = a;
    for (Timestep t = report.first_evaluated; t <= t_max; ++t) {
      ++arm.evaluated;
      const auto idx = static_cast<std::size_t>(t - 1) * k + a;
      const double lower = wilson_lower(counts[idx], reps, kZ95OneSided);
      const double excess = lower - bound.arm_bound(a, t);
      arm.worst_excess = std::max(arm.worst_excess, excess);
      if (excess > 0.0) {
        ++arm.violations;
        if (!arm.first_violation) arm.first_violation = t;
      }
    }
    report.arms.push_back(arm);
  }

  const bool evaluated = std::any_of(report.arms.begin(), report.arms.end(),
                                     [](const EnvelopeArmReport& r) { return r.evaluated > 0; });
  const bool violated = std::any_of(report.arms.begin(), report.arms.end(),
                                    [](const EnvelopeArmReport& r) { return r.violations > 0; });
  if (!evaluated) {
    report.verdict = Verdict::not_evaluated;
  } else {
    report.verdict = violated ? Verdict::violated : Verdict::consistent;
  }
  return report;
}

EnvelopeReport check_monotone_envelope(const Policy& policy, const BernoulliEnv& env,
                                       std::size_t reps, Timestep t_max,
                                       std::uint64_t master_seed, unsigned threads) {
  if (dynamic_cast<const UcbPolicy*>(&policy) == nullptr) {
    throw UnsupportedError("no monotone bound is registered for policy '" + policy.name() + "'");
  }
  const auto bound = MonotoneBound::for_instance(env.means());
  // The first K steps are the forced initial pulls.
  const auto first = static_cast<Timestep>(env.num_arms()) + 1;
  return check_envelope_against(policy, env, bound, reps, t_max, first, master_seed, threads);
}

namespace {

std::vector<HistoryEntry> paired_history(const BernoulliEnv& env, Timestep t, std::size_t optimal,
                                         Rng& rng) {
  const ActionIndex best = env.best_arm({});
  std::vector<ActionIndex> others;
  for (ActionIndex a = 0; a < env.num_arms(); ++a) {
    if (a != best) others.push_back(a);
  }
  std::vector<ActionIndex> actions(static_cast<std::size_t>(t), best);
  for (std::size_t i = optimal; i < actions.size(); ++i) {
    const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(others.size()));
    actions[i] = others[std::min(pick, others.size() - 1)];
  }
  std::shuffle(actions.begin(), actions.end(), rng.engine());
  std::vector<HistoryEntry> entries;
  entries.reserve(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    entries.push_back({static_cast<Timestep>(i + 1), actions[i],
                       env.sample_reward({}, actions[i], rng), {}});
  }
  return entries;
}

}  // namespace

InformativenessReport probe_informativeness(const Policy& policy, const BernoulliEnv& env,
                                            Timestep t, std::size_t more, std::size_t less,
                                            std::size_t reps, std::uint64_t master_seed) {
  if (t < 1) throw InvalidArgumentError("t must be at least 1");
  if (reps == 0) throw InvalidArgumentError("reps must be at least 1");
  if (more > static_cast<std::size_t>(t) || less > static_cast<std::size_t>(t)) {
    throw InvalidArgumentError("optimal-pull counts cannot exceed t");
  }
  if (less > more) throw InvalidArgumentError("expected more >= less");
  const Instance instance = env.instance();
  const std::string key = "informativeness;policy=" + policy.name() + ";env=" + env.name();

  Moments m_more;
  Moments m_less;
  Moments m_diff;
  for (std::size_t i = 0; i < reps; ++i) {
    const std::uint64_t seed = derive_seed(master_seed, key, i);
    Rng hist_rng = Rng::stream(seed, 0);
    Rng policy_rng = Rng::stream(seed, 1);
    const auto run_one = [&](std::size_t optimal) {
      auto copy = policy.clone();
      copy->update(paired_history(env, t, optimal, hist_rng));
      return rule_value(copy->decide(Round{t + 1, {}}, policy_rng), instance);
    };
    const double v_more = run_one(more);
    const double v_less = run_one(less);
    m_more.add(v_more);
    m_less.add(v_less);
    m_diff.add(v_more - v_less);
  }

  InformativenessReport report;
  report.mean_more = m_more.mean;
  report.mean_less = m_less.mean;
  report.difference = m_diff.mean;
  report.std_error = m_diff.std_error();
  const double slack = 2.0 * report.std_error;
  if (more == less) {
    report.verdict = Verdict::boundary;
  } else if (report.difference < -slack) {
    report.verdict = Verdict::violated;
  } else {
    report.verdict = Verdict::consistent;
  }
  return report;
}

}  // namespace batchband
