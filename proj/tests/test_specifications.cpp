#include <doctest.h>

#include <sstream>

#include "batchband/environments.hpp"
#include "batchband/error.hpp"
#include "batchband/policies.hpp"
#include "batchband/specifications.hpp"
#include "batchband/stats.hpp"
#include "oracles.hpp"

using namespace batchband;

namespace {

RunOptions visibility() {
  RunOptions o;
  o.record_visibility = true;
  return o;
}

}  // namespace

TEST_CASE("visibility laws of the three specifications") {
  const auto env = preset("env4");
  const UcbPolicy ucb(4);
  for (Timestep b : {1, 2, 3, 10}) {
    const auto grid = make_grid(60, b);
    const auto online = run_specification(ucb, env, grid, Specification::online, 1, visibility());
    const auto batch = run_specification(ucb, env, grid, Specification::batch, 1, visibility());
    const auto shrt = run_specification(ucb, env, grid, Specification::short_, 1, visibility());
    for (Timestep t = 1; t <= grid.n(); ++t) {
      const auto i = static_cast<std::size_t>(t - 1);
      CHECK(online.visible_len[i] == static_cast<std::size_t>(t - 1));
      CHECK(batch.visible_len[i] == oracle::visible_batch(t, b));
      CHECK(shrt.visible_len[i] == oracle::visible_short(t, b));
    }
  }
}

TEST_CASE("regret decomposes into per-step gaps") {
  const auto env = preset("env5");
  const auto g = gaps(env);
  const ThompsonBetaPolicy ts(4);
  for (auto spec : {Specification::online, Specification::batch, Specification::short_}) {
    const auto rec = run_specification(ts, env, make_grid(300, 4), spec, 9);
    double acc = 0.0;
    std::vector<std::size_t> pulls(4, 0);
    Timestep hits = 0;
    for (std::size_t i = 0; i < rec.actions.size(); ++i) {
      acc += g[rec.actions[i]];
      ++pulls[rec.actions[i]];
      if (rec.actions[i] == 1) ++hits;
      CHECK(rec.pseudo_regret[i] == doctest::Approx(acc).epsilon(1e-12));
      CHECK(rec.optimal_hits[i] == hits);
    }
    CHECK(rec.pull_counts == pulls);
    double via_pulls = 0.0;
    for (std::size_t a = 0; a < 4; ++a) via_pulls += static_cast<double>(pulls[a]) * g[a];
    CHECK(rec.final_regret() == doctest::Approx(via_pulls).epsilon(1e-12));
  }
}

TEST_CASE("with b = 1 all three specifications coincide") {
  const auto env = preset("env2");
  const ThompsonBetaPolicy ts(2);
  const auto grid = make_grid(500, 1);
  const auto online = run_specification(ts, env, grid, Specification::online, 3);
  const auto batch = run_specification(ts, env, grid, Specification::batch, 3);
  const auto shrt = run_specification(ts, env, grid, Specification::short_, 3);
  CHECK(online.actions == batch.actions);
  CHECK(online.actions == shrt.actions);
  CHECK(online.final_regret() == batch.final_regret());
}

TEST_CASE("the short specification sees one entry per finished batch") {
  const auto env = preset("env1");
  const UcbPolicy ucb(2);
  const auto grid = make_grid(100, 10);
  const auto rec = run_specification(ucb, env, grid, Specification::short_, 2, visibility());
  CHECK(rec.visible_len.back() == static_cast<std::size_t>(grid.num_batches() - 1));
}

TEST_CASE("a deterministic policy repeats its action within a batch") {
  const auto env = preset("env6");
  const UcbPolicy ucb(4);
  for (auto spec : {Specification::batch, Specification::short_}) {
    const auto grid = make_grid(200, 8);
    const auto rec = run_specification(ucb, env, grid, spec, 4);
    for (Timestep j = 1; j <= grid.num_batches(); ++j) {
      const auto first = rec.actions[static_cast<std::size_t>(grid.batch_start(j) - 1)];
      for (Timestep t = grid.batch_start(j); t <= grid.batch_end(j); ++t) {
        CHECK(rec.actions[static_cast<std::size_t>(t - 1)] == first);
      }
    }
  }
}

TEST_CASE("with b = n Thompson sampling plays its prior throughout") {
  const auto env = preset("env1");
  const ThompsonBetaPolicy ts(2);
  RunOptions o;
  o.record_visibility = true;
  const auto rec = run_specification(ts, env, make_grid(200, 200), Specification::batch, 6, o);
  for (auto v : rec.visible_len) CHECK(v == 0);
  std::size_t first = 0;
  for (auto a : rec.actions) first += a == 0 ? 1 : 0;
  CHECK(first > 60);
  CHECK(first < 140);
}

TEST_CASE("fixed-rule policies have closed-form regret") {
  const auto env1 = preset("env1");
  PolicyConfig cfg;
  cfg.name = "worst";
  const auto worst = make_policy(cfg, env1, 10);
  CHECK(run_online(*worst, env1, 10, 0).final_regret() == doctest::Approx(2.0));
  cfg.name = "best";
  const auto best = make_policy(cfg, env1, 10);
  CHECK(run_online(*best, env1, 10, 0).final_regret() == 0.0);

  const auto u = uniform_policy(2);
  Moments m;
  for (std::uint64_t s = 0; s < 100; ++s) m.add(run_online(u, env1, 10000, s).final_regret() / 1e4);
  CHECK(std::abs(m.mean - oracle::uniform_regret_rate({0.7, 0.5})) <= 0.01);
}

TEST_CASE("batching raises UCB regret on env1") {
  const auto env1 = preset("env1");
  const UcbPolicy ucb(2);
  const auto grid = make_grid(1000, 10);
  Moments diff;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto seed = derive_seed(1, "paired", s);
    diff.add(run_batch(ucb, env1, grid, seed).final_regret() -
             run_online(ucb, env1, 1000, seed).final_regret());
  }
  CHECK(diff.mean > 2 * diff.std_error());
}

TEST_CASE("runs replay exactly from their seed") {
  const auto env = preset("env4");
  const ThompsonBetaPolicy ts(4);
  const auto grid = make_grid(300, 5);
  const auto a = run_batch(ts, env, grid, 77);
  const auto b = run_batch(ts, env, grid, 77);
  const auto c = run_batch(ts, env, grid, 78);
  CHECK(a.actions == b.actions);
  CHECK(a.actions != c.actions);

  RunOptions o;
  o.record_rules = true;
  const auto r = run_batch(ts, env, grid, 77, o);
  CHECK(r.actions == a.actions);
  CHECK(r.rules.size() == 300);
}

TEST_CASE("run records serialize and parse errors are reported") {
  const auto env = preset("env1");
  const UcbPolicy ucb(2);
  const std::vector<RunRecord> recs{run_online(ucb, env, 20, 1)};
  std::ostringstream out;
  write_run_records_csv(out, recs);
  CHECK(out.str().rfind("spec,policy,env,n,b,seed,final_regret,optimal_pulls\nonline,ucb,env1,20,1,1,",
                        0) == 0);
  CHECK(parse_specification("short") == Specification::short_);
  CHECK_THROWS_AS(parse_specification("offline"), ConfigError);
  const UcbPolicy three(3);
  CHECK_THROWS_AS(run_online(three, env, 5, 0), DimensionMismatchError);
}

TEST_CASE("contextual runs feed contexts to linear policies") {
  const auto env = LinearContextualEnv::random(3, 4, 2);
  const LinUcbPolicy lin(4, 3);
  const auto rec = run_specification(lin, env, make_grid(400, 4), Specification::batch, 1);
  CHECK(rec.actions.size() == 400);
  for (std::size_t i = 1; i < rec.pseudo_regret.size(); ++i) {
    CHECK(rec.pseudo_regret[i] >= rec.pseudo_regret[i - 1]);
  }
}
