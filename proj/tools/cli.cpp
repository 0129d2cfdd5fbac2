#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "batchband/assumptions.hpp"
#include "batchband/csv.hpp"
#include "batchband/environments.hpp"
#include "batchband/error.hpp"
#include "batchband/harness.hpp"
#include "batchband/meta.hpp"
#include "batchband/parallel.hpp"
#include "batchband/plot.hpp"
#include "batchband/policies.hpp"
#include "batchband/replay.hpp"

namespace batchband::cli {

namespace {

constexpr int kExitGated = 1;
constexpr int kExitUsage = 2;

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + path.string());
  return file;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot read " + path.string());
  return file;
}

void add_policy_params(CLI::App* app, PolicyConfig& params) {
  app->add_option("--ucb_c", params.ucb_c, "UCB exploration constant c")->capture_default_str();
  app->add_option("--ridge_lambda", params.ridge_lambda, "Ridge regularizer of the linear policies")
      ->capture_default_str();
  app->add_option("--linucb_alpha", params.linucb_alpha, "LinUCB confidence multiplier")
      ->capture_default_str();
}

struct SimulateArgs {
  ExperimentConfig config;
  std::string mode = "plain";
  std::string bound = "instance";
  std::string spec = "batch";
  std::string out_dir = ".";
  bool plot = false;
  bool runs = false;
};

struct BoundsArgs {
  std::string env = "env1";
  std::string policy = "ts";
  PolicyConfig params;
  Timestep n = 1000;
  std::vector<Timestep> b = {10};
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  std::string out = "bounds.csv";
};

struct AssumptionArgs {
  std::string env = "env3";
  std::string policy = "ucb";
  PolicyConfig params;
  Timestep n = 2000;
  Timestep b = 2;
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  Timestep t_min = 50;
  Timestep envelope_t_max = 2000;
  Timestep probe_t = 10;
  std::size_t probe_more = 8;
  std::size_t probe_less = 2;
  std::string out = "assumptions.csv";
};

struct ReplayArgs {
  std::string data;
  std::vector<std::string> policies = {"ucb", "ts", "uniform"};
  std::string baseline = "uniform";
  PolicyConfig params;
  std::vector<Timestep> b = {1};
  std::size_t arms = 0;
  std::uint64_t seed = 0;
  std::string out = "replay.csv";
};

struct SynthArgs {
  std::string env = "env1";
  std::size_t context_dim = 0;
  std::size_t arms = 2;
  std::uint64_t theta_seed = 0;
  std::size_t records = 100000;
  std::uint64_t seed = 0;
  std::string out = "logs.csv";
};

struct PlotArgs {
  std::string curves = "curves.csv";
  std::string out = "plot.svg";
};

int do_simulate(SimulateArgs& args, unsigned threads, std::ostream& out) {
  ExperimentConfig& config = args.config;
  config.mode = parse_mode(args.mode);
  config.bound = parse_bound(args.bound);
  config.spec = parse_specification(args.spec);
  config.threads = threads;
  config.validate();

  const RegretTable table = run_experiment(config);
  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  {
    auto file = open_output(dir / "results.csv");
    write_results_csv(file, table);
  }
  {
    auto file = open_output(dir / "curves.csv");
    write_curves_csv(file, table);
  }
  if (args.runs) {
    auto file = open_output(dir / "runs.csv");
    write_runs_csv(file, table);
  }
  if (args.plot) {
    std::vector<PlotPoint> points;
    for (const auto& row : table.rows) {
      points.push_back({row.env, row.policy, row.b, row.mean_regret, row.se_regret});
    }
    auto file = open_output(dir / "plot.svg");
    write_svg(file, points);
  }
  out << "wrote " << table.rows.size() << " cells to " << (dir / "results.csv").string() << '\n';
  return 0;
}

int do_check_bounds(const BoundsArgs& args, unsigned threads, std::ostream& out) {
  for (Timestep b : args.b) {
    if (b < 2) throw ConfigError("check-bounds needs b >= 2, got " + std::to_string(b));
  }
  const BernoulliEnv env = parse_env(args.env);
  PolicyConfig pc = args.params;
  pc.name = args.policy;
  std::vector<ReportRow> rows;
  bool ok = true;
  for (Timestep b : args.b) {
    const BatchGrid grid = make_grid(args.n, b);
    const auto policy = make_policy(pc, env, grid.n());
    const BoundReport report =
        check_regret_bounds(*policy, env, args.n, b, args.reps, args.seed, threads);
    ok = ok && report.gated_ok();
    const auto more = report.rows();
    rows.insert(rows.end(), more.begin(), more.end());
  }
  write_report_text(out, rows);
  auto file = open_output(args.out);
  write_report_csv(file, rows);
  out << (ok ? "gated inequalities hold" : "gated inequality violated") << '\n';
  return ok ? 0 : kExitGated;
}

int do_check_assumptions(const AssumptionArgs& args, unsigned threads, std::ostream& out) {
  const BernoulliEnv env = parse_env(args.env);
  PolicyConfig pc = args.params;
  pc.name = args.policy;
  const BatchGrid grid = make_grid(args.n, args.b);
  const auto policy = make_policy(pc, env, grid.n());
  const std::string subject = args.policy + "/" + env.name();
  std::vector<ReportRow> rows;

  const RegretCurve curve = regret_curve(*policy, env, Specification::online,
                                         make_grid(grid.n(), 1), args.reps, args.seed, threads);
  const auto sub = check_sublinearity(curve, args.t_min);
  rows.push_back({"sublinearity", subject, sub.verdict, static_cast<double>(sub.violation_count)});

  const auto run = run_online(*policy, env, grid.n(), derive_seed(args.seed, "rule_orderings", 0),
                              RunOptions{false, true});
  const auto orderings = check_rule_orderings(run.rules, env.instance());
  rows.push_back({"average_rule_improves", subject, orderings.average_improves.verdict,
                  static_cast<double>(orderings.average_improves.reversed)});
  rows.push_back({"current_beats_average", subject, orderings.current_beats_average.verdict,
                  static_cast<double>(orderings.current_beats_average.reversed)});

  const auto negated = check_negated_sublinearity(*policy, env, grid, args.reps, args.seed, threads);
  rows.push_back({"negated_sublinearity", subject + "/b=" + std::to_string(args.b),
                  negated.verdict, negated.difference, negated.difference - negated.slack,
                  negated.difference + negated.slack});

  std::optional<Verdict> envelope_verdict;
  try {
    const auto env_report =
        check_monotone_envelope(*policy, env, args.reps, args.envelope_t_max, args.seed, threads);
    envelope_verdict = env_report.verdict;
    double worst = -1.0;
    for (const auto& arm : env_report.arms) worst = std::max(worst, arm.worst_excess);
    rows.push_back({"monotone_envelope", subject, env_report.verdict, worst});
  } catch (const UnsupportedError&) {
    rows.push_back({"monotone_envelope", subject, Verdict::not_evaluated});
  }

  const auto probe = probe_informativeness(*policy, env, args.probe_t, args.probe_more,
                                           args.probe_less, args.reps, args.seed);
  rows.push_back({"informativeness", subject, probe.verdict, probe.difference,
                  probe.difference - 2.0 * probe.std_error,
                  probe.difference + 2.0 * probe.std_error});

  if (env.num_arms() == 2 && envelope_verdict) {
    const bool sub_ok = sub.verdict != Verdict::violated;
    const bool env_ok = *envelope_verdict != Verdict::violated;
    rows.push_back({"two_arm_agreement", subject,
                    sub_ok == env_ok ? Verdict::consistent : Verdict::inconclusive,
                    sub_ok == env_ok ? 1.0 : 0.0});
  }

  write_report_text(out, rows);
  auto file = open_output(args.out);
  write_report_csv(file, rows);
  return 0;
}

int do_replay(const ReplayArgs& args, std::ostream& out) {
  auto in = open_input(args.data);
  const auto records = read_logged_csv(in);
  if (records.empty()) throw DataError("logged-data file has no records");
  std::size_t arms = args.arms;
  if (arms == 0) {
    for (const auto& r : records) arms = std::max(arms, r.action + 1);
    arms = std::max<std::size_t>(arms, 2);
  }
  const std::size_t p = records.front().context.size();

  std::vector<std::string> names = args.policies;
  for (Timestep b : args.b) {
    if (b < 1) throw ConfigError("batch sizes must be at least 1");
  }
  std::vector<ReplayResult> results;
  for (Timestep b : args.b) {
    PolicyConfig base_pc = args.params;
    base_pc.name = args.baseline;
    const auto baseline = replay_evaluate(*make_learning_policy(base_pc, arms, p), records, b,
                                          derive_seed(args.seed, "replay;policy=" + args.baseline, 0));
    for (const auto& name : names) {
      PolicyConfig pc = args.params;
      pc.name = name;
      ReplayResult r = replay_evaluate(*make_learning_policy(pc, arms, p), records, b,
                                       derive_seed(args.seed, "replay;policy=" + name, 0));
      if (r.cr && baseline.cr && *baseline.cr > 0.0) r.relative_cr = relative_cr(r, baseline);
      results.push_back(std::move(r));
    }
  }
  auto file = open_output(args.out);
  write_replay_csv(file, results);
  write_replay_csv(out, results);
  return 0;
}

int do_synth(const SynthArgs& args, std::ostream& out) {
  if (args.records == 0) throw ConfigError("records must be at least 1");
  std::vector<LoggedRecord> records;
  if (args.context_dim > 0) {
    if (args.arms < 2) throw ConfigError("arms must be at least 2");
    const auto env = LinearContextualEnv::random(args.context_dim, args.arms, args.theta_seed);
    records = synth_logged_dataset(env, DecisionRule::uniform(args.arms), args.records, args.seed);
  } else {
    const BernoulliEnv env = parse_env(args.env);
    records = synth_logged_dataset(env, DecisionRule::uniform(env.num_arms()), args.records,
                                   args.seed);
  }
  auto file = open_output(args.out);
  write_logged_csv(file, records);
  out << "wrote " << records.size() << " records to " << args.out << '\n';
  return 0;
}

int do_presets(std::ostream& out) {
  out << "name,means,gaps\n";
  for (const auto& name : preset_names()) {
    const BernoulliEnv env = preset(name);
    std::string means;
    std::string gap_text;
    for (std::size_t a = 0; a < env.num_arms(); ++a) {
      if (a > 0) {
        means += '/';
        gap_text += '/';
      }
      means += format_double(env.means()[a]);
      gap_text += format_double(env.gaps()[a]);
    }
    out << name << ',' << means << ',' << gap_text << '\n';
  }
  return 0;
}

int do_plot(const PlotArgs& args, std::ostream& out) {
  auto in = open_input(args.curves);
  const auto points = read_curve_endpoints(in);
  auto file = open_output(args.out);
  write_svg(file, points);
  out << "wrote " << args.out << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Batched bandit simulations, bound checks and replay evaluation", "batchband"};
  app.set_config("--config", "", "INI file; [subcommand] sections hold that command's flags");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  unsigned threads = default_threads();
  app.add_option("--threads", threads, "Worker threads; results do not depend on this")
      ->envname("BATCHBAND_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Regret table over env x policy x batch size");
  simulate->add_option("--env", sim.config.envs, "Presets or inline means such as 0.9/0.1")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--policy", sim.config.policies, "Policies: " + [] {
    std::string s;
    for (const auto& n : policy_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }())->delimiter(',')->capture_default_str();
  simulate->add_option("--n", sim.config.n, "Horizon")->capture_default_str();
  simulate->add_option("--b", sim.config.batch_sizes, "Batch sizes")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--reps", sim.config.reps, "Repetitions per cell")->capture_default_str();
  simulate->add_option("--seed", sim.config.master_seed, "Master seed")->capture_default_str();
  simulate->add_option("--mode", sim.mode, "plain, delayed_start or approx_delayed_start")
      ->capture_default_str();
  simulate->add_option("--delta", sim.config.delta, "CheckPhase failure probability")
      ->capture_default_str();
  simulate->add_option("--bound", sim.bound, "Delayed-start switch: instance or oracle")
      ->capture_default_str();
  simulate->add_option("--spec", sim.spec, "online, batch or short")->capture_default_str();
  add_policy_params(simulate, sim.config.params);
  simulate->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
  simulate->add_flag("--plot", sim.plot, "Also write plot.svg");
  simulate->add_flag("--runs", sim.runs, "Also write runs.csv with per-repetition results");

  BoundsArgs bounds;
  auto* check_bounds = app.add_subcommand("check-bounds", "Check the batch regret sandwich");
  check_bounds->add_option("--env", bounds.env, "Preset or inline means")->capture_default_str();
  check_bounds->add_option("--policy", bounds.policy, "Policy")->capture_default_str();
  check_bounds->add_option("--n", bounds.n, "Horizon")->capture_default_str();
  check_bounds->add_option("--b", bounds.b, "Batch sizes, each >= 2")
      ->delimiter(',')
      ->capture_default_str();
  check_bounds->add_option("--reps", bounds.reps, "Repetitions")->capture_default_str();
  check_bounds->add_option("--seed", bounds.seed, "Master seed")->capture_default_str();
  add_policy_params(check_bounds, bounds.params);
  check_bounds->add_option("--out", bounds.out, "Report CSV")->capture_default_str();

  AssumptionArgs assume;
  auto* check_assumptions =
      app.add_subcommand("check-assumptions", "Empirical checks of the policy assumptions");
  check_assumptions->add_option("--env", assume.env, "Preset or inline means")
      ->capture_default_str();
  check_assumptions->add_option("--policy", assume.policy, "Policy")->capture_default_str();
  check_assumptions->add_option("--n", assume.n, "Horizon")->capture_default_str();
  check_assumptions->add_option("--b", assume.b, "Batch size for the reversed inequality")
      ->capture_default_str();
  check_assumptions->add_option("--reps", assume.reps, "Repetitions")->capture_default_str();
  check_assumptions->add_option("--seed", assume.seed, "Master seed")->capture_default_str();
  check_assumptions->add_option("--t_min", assume.t_min, "First t of the sublinearity check")
      ->capture_default_str();
  check_assumptions->add_option("--envelope_t_max", assume.envelope_t_max,
                                "Horizon of the envelope check")
      ->capture_default_str();
  check_assumptions->add_option("--probe_t", assume.probe_t, "History length of the probe")
      ->capture_default_str();
  check_assumptions->add_option("--probe_more", assume.probe_more, "Optimal pulls in H")
      ->capture_default_str();
  check_assumptions->add_option("--probe_less", assume.probe_less, "Optimal pulls in H'")
      ->capture_default_str();
  add_policy_params(check_assumptions, assume.params);
  check_assumptions->add_option("--out", assume.out, "Report CSV")->capture_default_str();

  ReplayArgs rep;
  auto* replay = app.add_subcommand("replay", "Replay evaluation on logged data");
  replay->add_option("--data", rep.data, "Logged-data CSV")->required();
  replay->add_option("--policy", rep.policies, "Policies: ucb, ts, linucb, lints, uniform")
      ->delimiter(',')
      ->capture_default_str();
  replay->add_option("--baseline", rep.baseline, "Policy used for the relative CR")
      ->capture_default_str();
  replay->add_option("--b", rep.b, "Batch sizes (matched records per batch)")
      ->delimiter(',')
      ->capture_default_str();
  replay->add_option("--arms", rep.arms, "Number of arms, 0 infers it from the data")
      ->capture_default_str();
  replay->add_option("--seed", rep.seed, "Master seed")->capture_default_str();
  add_policy_params(replay, rep.params);
  replay->add_option("--out", rep.out, "Output CSV")->capture_default_str();

  SynthArgs synth;
  auto* synth_logs = app.add_subcommand("synth-logs", "Generate uniformly logged synthetic data");
  synth_logs->add_option("--env", synth.env, "Bernoulli preset or inline means")
      ->capture_default_str();
  synth_logs->add_option("--context_dim", synth.context_dim,
                         "Context dimension; > 0 selects a linear contextual environment")
      ->capture_default_str();
  synth_logs->add_option("--arms", synth.arms, "Arms of the linear environment")
      ->capture_default_str();
  synth_logs->add_option("--theta_seed", synth.theta_seed, "Seed of the linear parameter")
      ->capture_default_str();
  synth_logs->add_option("--records", synth.records, "Number of records")->capture_default_str();
  synth_logs->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  synth_logs->add_option("--out", synth.out, "Output CSV")->capture_default_str();

  auto* presets = app.add_subcommand("presets", "List the Bernoulli presets");

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "Render curves.csv as an SVG chart per environment");
  plot->add_option("--curves", plot_args.curves, "Input curves.csv")->capture_default_str();
  plot->add_option("--out", plot_args.out, "Output SVG")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    for (const auto* sub : app.get_subcommands()) {
      if (sub == presets) continue;
      out << "# resolved configuration\nthreads=" << threads << "\n[" << sub->get_name() << "]\n"
          << sub->config_to_str(true, false);
    }
    if (simulate->parsed()) return do_simulate(sim, threads, out);
    if (check_bounds->parsed()) return do_check_bounds(bounds, threads, out);
    if (check_assumptions->parsed()) return do_check_assumptions(assume, threads, out);
    if (replay->parsed()) return do_replay(rep, out);
    if (synth_logs->parsed()) return do_synth(synth, out);
    if (presets->parsed()) return do_presets(out);
    if (plot->parsed()) return do_plot(plot_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace batchband::cli
