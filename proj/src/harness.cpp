#include "batchband/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <set>

#include "batchband/csv.hpp"
#include "batchband/error.hpp"
#include "batchband/meta.hpp"
#include "batchband/montecarlo.hpp"
#include "batchband/parallel.hpp"

namespace batchband {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::plain: return "plain";
    case Mode::delayed_start: return "delayed_start";
    case Mode::approx_delayed_start: return "approx_delayed_start";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "plain") return Mode::plain;
  if (text == "delayed_start") return Mode::delayed_start;
  if (text == "approx_delayed_start") return Mode::approx_delayed_start;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "'; expected plain, delayed_start or approx_delayed_start");
}

std::string to_string(BoundKind kind) {
  return kind == BoundKind::instance ? "instance" : "oracle";
}

BoundKind parse_bound(std::string_view text) {
  if (text == "instance") return BoundKind::instance;
  if (text == "oracle") return BoundKind::oracle;
  throw ConfigError("unknown bound '" + std::string(text) + "'; expected instance or oracle");
}

void ExperimentConfig::validate() const {
  if (envs.empty()) throw ConfigError("at least one environment is required");
  if (policies.empty()) throw ConfigError("at least one policy is required");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (reps < 1) throw ConfigError("reps must be at least 1");
  if (batch_sizes.empty()) throw ConfigError("at least one batch size is required");
  std::set<Timestep> seen;
  for (Timestep b : batch_sizes) {
    if (b < 1) throw ConfigError("batch sizes must be at least 1");
    if (b > n) {
      throw ConfigError("batch size " + std::to_string(b) + " exceeds the horizon " +
                        std::to_string(n));
    }
    if (!seen.insert(b).second) throw ConfigError("duplicate batch size " + std::to_string(b));
  }
  if (!(params.ucb_c > 0.0)) throw ConfigError("ucb_c must be positive");
  if (!(params.ridge_lambda > 0.0)) throw ConfigError("ridge_lambda must be positive");
  if (!(params.linucb_alpha >= 0.0)) throw ConfigError("linucb_alpha must be non-negative");
  if (mode == Mode::approx_delayed_start && !(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
  for (const auto& name : envs) {
    const BernoulliEnv env = parse_env(name);
    if (mode == Mode::delayed_start) {
      try {
        (void)MonotoneBound::for_instance(env.means());
      } catch (const DegenerateInstanceError& e) {
        throw ConfigError("environment '" + name + "': " + e.what());
      }
    }
    for (const auto& policy : policies) {
      PolicyConfig pc = params;
      pc.name = policy;
      (void)make_policy(pc, env, n);
    }
  }
}

const RegretRow& RegretTable::at(std::string_view env, std::string_view policy, Timestep b) const {
  for (const auto& row : rows) {
    if (row.env == env && row.policy == policy && row.b == b) return row;
  }
  throw InvalidArgumentError("no cell for env=" + std::string(env) +
                             " policy=" + std::string(policy) + " b=" + std::to_string(b));
}

std::string cell_key(std::string_view env, std::string_view policy, Specification spec, Mode mode,
                     Timestep b, Timestep n) {
  return "env=" + std::string(env) + ";policy=" + std::string(policy) +
         ";spec=" + to_string(spec) + ";mode=" + to_string(mode) + ";b=" + std::to_string(b) +
         ";n=" + std::to_string(n);
}

namespace {

struct Cell {
  const BernoulliEnv* env = nullptr;
  std::string env_name;
  std::unique_ptr<Policy> policy;
  BatchGrid grid;
  std::string key;
  std::function<double(Timestep)> bound;
};

struct ChunkResult {
  Moments regret;
  Moments optimal;
  std::vector<Moments> pulls;
  CurveMoments curve;
  std::vector<double> finals;
  std::vector<Timestep> hits;
  std::vector<std::optional<Timestep>> taus;
};

RunRecord run_cell(const Cell& cell, const ExperimentConfig& config, std::uint64_t seed) {
  switch (config.mode) {
    case Mode::plain:
      return run_specification(*cell.policy, *cell.env, cell.grid, config.spec, seed);
    case Mode::delayed_start:
      return delayed_start_run(*cell.policy, uniform_policy(cell.env->num_arms()), cell.bound,
                               *cell.env, cell.grid, seed, config.spec);
    case Mode::approx_delayed_start:
      return approx_delayed_start_run(*cell.policy, *cell.env, cell.grid, config.delta, seed,
                                      config.spec);
  }
  throw ConfigError("unknown mode");
}

}  // namespace

RegretTable run_experiment(const ExperimentConfig& config) {
  config.validate();

  std::vector<BernoulliEnv> envs;
  envs.reserve(config.envs.size());
  for (const auto& name : config.envs) envs.push_back(parse_env(name));

  std::vector<Cell> cells;
  for (std::size_t e = 0; e < envs.size(); ++e) {
    for (const auto& policy_name : config.policies) {
      for (Timestep b : config.batch_sizes) {
        Cell cell{&envs[e], config.envs[e], nullptr, make_grid(config.n, b), "", {}};
        PolicyConfig pc = config.params;
        pc.name = policy_name;
        cell.policy = make_policy(pc, envs[e], cell.grid.n());
        cell.key = cell_key(config.envs[e], policy_name, config.spec, config.mode, b,
                            cell.grid.n());
        if (config.mode == Mode::delayed_start) {
          const auto bound = MonotoneBound::for_instance(envs[e].means());
          const double offset = config.bound == BoundKind::oracle
                                    ? 1.0 / static_cast<double>(envs[e].num_arms())
                                    : 0.0;
          cell.bound = [bound, offset](Timestep t) { return bound.value(t) - offset; };
        }
        cells.push_back(std::move(cell));
      }
    }
  }

  const std::size_t chunks = num_chunks(config.reps);
  const auto results = parallel_map(cells.size() * chunks, config.threads, [&](std::size_t item) {
    const Cell& cell = cells[item / chunks];
    const std::size_t c = item % chunks;
    const std::size_t k = cell.env->num_arms();
    ChunkResult out;
    out.pulls.resize(k);
    const std::size_t end = std::min(config.reps, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      const auto run = run_cell(cell, config, derive_seed(config.master_seed, cell.key, i));
      out.regret.add(run.final_regret());
      out.optimal.add(static_cast<double>(run.optimal_pulls()) / static_cast<double>(run.n));
      for (std::size_t a = 0; a < k; ++a) {
        out.pulls[a].add(static_cast<double>(run.pull_counts[a]));
      }
      out.curve.add(run.pseudo_regret);
      out.finals.push_back(run.final_regret());
      out.hits.push_back(run.optimal_pulls());
      out.taus.push_back(run.phase ? run.phase->tau : std::nullopt);
    }
    return out;
  });

  RegretTable table;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const Cell& cell = cells[ci];
    ChunkResult total;
    total.pulls.resize(cell.env->num_arms());
    for (std::size_t c = 0; c < chunks; ++c) {
      const ChunkResult& part = results[ci * chunks + c];
      total.regret.merge(part.regret);
      total.optimal.merge(part.optimal);
      for (std::size_t a = 0; a < total.pulls.size(); ++a) total.pulls[a].merge(part.pulls[a]);
      total.curve.merge(part.curve);
      total.finals.insert(total.finals.end(), part.finals.begin(), part.finals.end());
      total.hits.insert(total.hits.end(), part.hits.begin(), part.hits.end());
      total.taus.insert(total.taus.end(), part.taus.begin(), part.taus.end());
    }

    RegretRow row;
    row.env = cell.env_name;
    row.policy = cell.policy->name();
    row.spec = config.spec;
    row.mode = config.mode;
    row.b = cell.grid.b();
    row.n = cell.grid.n();
    row.reps = config.reps;
    row.cell = cell.key;
    row.master_seed = config.master_seed;
    row.mean_regret = total.regret.mean;
    row.se_regret = total.regret.std_error();
    row.optimal_fraction = total.optimal.mean;
    for (const auto& m : total.pulls) row.mean_pulls.push_back(m.mean);
    row.gaps = gaps(*cell.env);
    row.curve_mean = total.curve.means();
    row.curve_se = total.curve.std_errors();
    row.final_regret = std::move(total.finals);
    row.optimal_pulls = std::move(total.hits);
    row.tau = std::move(total.taus);
    if (config.mode != Mode::plain) {
      Moments tau;
      for (const auto& t : row.tau) {
        if (t) tau.add(static_cast<double>(*t));
      }
      row.switch_rate = static_cast<double>(tau.count) / static_cast<double>(row.reps);
      if (tau.count > 0) {
        row.tau_mean = tau.mean;
        row.tau_sd = std::sqrt(tau.variance());
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_results_csv(std::ostream& out, const RegretTable& table) {
  out << "env,policy,spec,mode,b,n,reps,mean_regret,stderr,optimal_fraction,tau_hat_mean,"
         "tau_hat_sd,switch_rate\n";
  for (const auto& r : table.rows) {
    const bool delayed = r.mode != Mode::plain;
    out << r.env << ',' << r.policy << ',' << to_string(r.spec) << ',' << to_string(r.mode) << ','
        << r.b << ',' << r.n << ',' << r.reps << ',' << format_double(r.mean_regret) << ','
        << format_double(r.se_regret) << ',' << format_double(r.optimal_fraction) << ','
        << (r.tau_mean ? format_double(*r.tau_mean) : "") << ','
        << (r.tau_sd ? format_double(*r.tau_sd) : "") << ','
        << (delayed ? format_double(r.switch_rate) : "") << '\n';
  }
}

void write_curves_csv(std::ostream& out, const RegretTable& table) {
  out << "cell,t,mean,stderr\n";
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.curve_mean.size(); ++i) {
      out << r.cell << ',' << (i + 1) << ',' << format_double(r.curve_mean[i]) << ','
          << format_double(r.curve_se[i]) << '\n';
    }
  }
}

void write_runs_csv(std::ostream& out, const RegretTable& table) {
  out << "cell,rep,seed,final_regret,optimal_pulls,tau_hat\n";
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.final_regret.size(); ++i) {
      out << r.cell << ',' << i << ',' << derive_seed(r.master_seed, r.cell, i) << ','
          << format_double(r.final_regret[i]) << ',' << r.optimal_pulls[i] << ','
          << (r.tau[i] ? std::to_string(*r.tau[i]) : "") << '\n';
    }
  }
}

namespace {

ReportRow inequality_row(std::string check, std::string subject, Verdict verdict, double diff,
                         double se) {
  return ReportRow{std::move(check), std::move(subject), verdict, diff, diff - 2.0 * se,
                   diff + 2.0 * se};
}

}  // namespace

std::vector<ReportRow> BoundReport::rows() const {
  const std::string subject = policy + "/" + env + "/n=" + std::to_string(n) +
                              "/b=" + std::to_string(b);
  const double lower_se = pooled_se(online.se, batch.se);
  const double upper_se = pooled_se(batch.se, scaled_short.se);
  std::vector<ReportRow> out;
  out.push_back(inequality_row("lower_nonstrict", subject, lower, online.mean - batch.mean,
                               lower_se));
  out.push_back(inequality_row("lower_strict", subject, strict_lower, batch.mean - online.mean,
                               lower_se));
  out.push_back(inequality_row("upper", subject, upper, batch.mean - scaled_short.mean, upper_se));
  const auto estimate_row = [&](std::string name, const Estimate& e) {
    return ReportRow{std::move(name), subject, Verdict::not_evaluated, e.mean,
                     e.mean - 2.0 * e.se, e.mean + 2.0 * e.se};
  };
  out.push_back(estimate_row("regret_online", online));
  out.push_back(estimate_row("regret_batch", batch));
  out.push_back(estimate_row("regret_scaled_horizon_m", scaled_short));
  out.push_back(estimate_row("regret_short", short_spec));
  return out;
}

BoundReport check_regret_bounds(const Policy& policy, const Environment& env, Timestep n,
                                 Timestep b, std::size_t reps, std::uint64_t master_seed,
                                 unsigned threads) {
  if (b < 2) throw InvalidArgumentError("the sandwich bound needs b >= 2");
  if (reps < 1) throw InvalidArgumentError("reps must be at least 1");
  const BatchGrid grid = make_grid(n, b);

  BoundReport report;
  report.policy = policy.name();
  report.env = env.name();
  report.n = grid.n();
  report.b = b;
  report.m = grid.num_batches();
  report.reps = reps;

  const std::string base = "bounds;policy=" + policy.name() + ";env=" + env.name() +
                           ";n=" + std::to_string(grid.n()) + ";b=" + std::to_string(b);
  report.online = estimate(final_regrets(policy, env, make_grid(grid.n(), 1),
                                         Specification::online, reps, master_seed,
                                         base + ";online", threads));
  report.batch = estimate(final_regrets(policy, env, grid, Specification::batch, reps, master_seed,
                                        base + ";batch", threads));
  const Estimate horizon_m =
      estimate(final_regrets(policy, env, make_grid(report.m, 1), Specification::online, reps,
                             master_seed, base + ";horizon_m", threads));
  const double bd = static_cast<double>(b);
  report.scaled_short = {bd * horizon_m.mean, bd * horizon_m.se};
  report.short_spec = estimate(final_regrets(policy, env, grid, Specification::short_, reps,
                                             master_seed, base + ";short", threads));

  const double lower_slack = 2.0 * pooled_se(report.online.se, report.batch.se);
  const double d_lower = report.batch.mean - report.online.mean;
  report.lower = -d_lower <= lower_slack ? Verdict::holds : Verdict::violated;
  if (d_lower <= -lower_slack) {
    report.strict_lower = Verdict::violated;
  } else if (d_lower > lower_slack) {
    report.strict_lower = Verdict::holds;
  } else {
    report.strict_lower = Verdict::inconclusive;
  }
  const double upper_slack = 2.0 * pooled_se(report.batch.se, report.scaled_short.se);
  report.upper = report.batch.mean - report.scaled_short.mean <= upper_slack ? Verdict::holds
                                                                             : Verdict::violated;
  return report;
}

RegretCurve regret_curve(const Policy& policy, const Environment& env, Specification spec,
                         const BatchGrid& grid, std::size_t reps, std::uint64_t master_seed,
                         unsigned threads) {
  if (reps < 1) throw InvalidArgumentError("reps must be at least 1");
  const std::string key = "curve;policy=" + policy.name() + ";env=" + env.name() +
                          ";spec=" + to_string(spec) + ";b=" + std::to_string(grid.b()) +
                          ";n=" + std::to_string(grid.n());
  const auto parts = parallel_map(num_chunks(reps), threads, [&](std::size_t c) {
    CurveMoments moments(static_cast<std::size_t>(grid.n()));
    const std::size_t end = std::min(reps, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      moments.add(
          run_specification(policy, env, grid, spec, derive_seed(master_seed, key, i))
              .pseudo_regret);
    }
    return moments;
  });
  CurveMoments total;
  for (const auto& part : parts) total.merge(part);
  return RegretCurve{total.means(), total.std_errors(), reps};
}

}  // namespace batchband
