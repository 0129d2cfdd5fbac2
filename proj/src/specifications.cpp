#include "batchband/specifications.hpp"

#include <ostream>

#include "batchband/csv.hpp"
#include "batchband/error.hpp"

namespace batchband {

namespace {

class SinglePolicy final : public Controller {
 public:
  explicit SinglePolicy(const Policy& prototype) : policy_(prototype.clone()) {}

  Policy& actor(Timestep) override { return *policy_; }
  void observe(std::span<const HistoryEntry> revealed) override { policy_->update(revealed); }
  std::string name() const override { return policy_->name(); }

 private:
  std::unique_ptr<Policy> policy_;
};

}  // namespace

std::string to_string(Specification spec) {
  switch (spec) {
    case Specification::online: return "online";
    case Specification::batch: return "batch";
    case Specification::short_: return "short";
  }
  return "unknown";
}

Specification parse_specification(std::string_view text) {
  if (text == "online") return Specification::online;
  if (text == "batch") return Specification::batch;
  if (text == "short") return Specification::short_;
  throw ConfigError("unknown specification '" + std::string(text) +
                    "'; expected online, batch or short");
}

RunRecord run_controlled(Controller& controller, const Environment& env, const BatchGrid& grid,
                         Specification spec, std::uint64_t seed, const RunOptions& options) {
  const Timestep n = grid.n();
  const Timestep b = grid.b();
  const std::size_t k = env.num_arms();

  RunRecord rec;
  rec.spec = spec;
  rec.policy = controller.name();
  rec.env = env.name();
  rec.n = n;
  rec.b = b;
  rec.seed = seed;
  rec.actions.reserve(static_cast<std::size_t>(n));
  rec.pseudo_regret.reserve(static_cast<std::size_t>(n));
  rec.optimal_hits.reserve(static_cast<std::size_t>(n));
  rec.pull_counts.assign(k, 0);

  Rng env_rng = Rng::stream(seed, 0);
  Rng policy_rng = Rng::stream(seed, 1);

  History played;
  // Entries revealed under the short specification; not a prefix of `played`.
  std::vector<HistoryEntry> short_view;
  const auto visible = [&]() -> std::span<const HistoryEntry> {
    if (spec == Specification::short_) return short_view;
    return played.visible();
  };

  double regret = 0.0;
  Timestep optimal = 0;
  for (Timestep t = 1; t <= n; ++t) {
    if (options.record_visibility) rec.visible_len.push_back(visible().size());

    std::vector<double> context = env.draw_context(env_rng);
    Policy& actor = controller.actor(t);
    if (actor.num_arms() != k) throw DimensionMismatchError("policy and environment disagree on K");
    DecisionRule rule = actor.decide(Round{t, context}, policy_rng);
    const ActionIndex a = rule.sample(policy_rng);
    const double reward = env.sample_reward(context, a, env_rng);

    regret += env.gap(context, a);
    if (a == env.best_arm(context)) ++optimal;
    ++rec.pull_counts[a];
    rec.actions.push_back(a);
    rec.pseudo_regret.push_back(regret);
    rec.optimal_hits.push_back(optimal);
    if (options.record_rules) rec.rules.push_back(std::move(rule));

    played.append(HistoryEntry{t, a, reward, std::move(context)});
    const bool batch_end = grid.is_batch_end(t);
    const auto entries = played.entries();
    switch (spec) {
      case Specification::online:
        played.reveal(entries.size());
        controller.observe(entries.last(1));
        break;
      case Specification::batch:
        if (batch_end) {
          played.reveal(entries.size());
          controller.observe(entries.last(static_cast<std::size_t>(b)));
        }
        break;
      case Specification::short_:
        if (batch_end) {
          short_view.push_back(entries[entries.size() - static_cast<std::size_t>(b)]);
          controller.observe(std::span<const HistoryEntry>(short_view).last(1));
        }
        break;
    }
    if (batch_end) controller.on_batch_end(t, visible());
  }
  rec.phase = controller.phase();
  return rec;
}

RunRecord run_specification(const Policy& policy, const Environment& env, const BatchGrid& grid,
                            Specification spec, std::uint64_t seed, const RunOptions& options) {
  SinglePolicy controller(policy);
  return run_controlled(controller, env, grid, spec, seed, options);
}

RunRecord run_online(const Policy& policy, const Environment& env, Timestep n, std::uint64_t seed,
                     const RunOptions& options) {
  if (n < 1) throw InvalidArgumentError("horizon must be at least 1");
  return run_specification(policy, env, make_grid(n, 1), Specification::online, seed, options);
}

RunRecord run_batch(const Policy& policy, const Environment& env, const BatchGrid& grid,
                    std::uint64_t seed, const RunOptions& options) {
  return run_specification(policy, env, grid, Specification::batch, seed, options);
}

RunRecord run_short(const Policy& policy, const Environment& env, const BatchGrid& grid,
                    std::uint64_t seed, const RunOptions& options) {
  return run_specification(policy, env, grid, Specification::short_, seed, options);
}

void write_run_records_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "spec,policy,env,n,b,seed,final_regret,optimal_pulls\n";
  for (const auto& r : records) {
    out << to_string(r.spec) << ',' << r.policy << ',' << r.env << ',' << r.n << ',' << r.b << ','
        << r.seed << ',' << format_double(r.final_regret()) << ',' << r.optimal_pulls() << '\n';
  }
}

}  // namespace batchband
