#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <vector>

#include "batchband/environments.hpp"
#include "batchband/error.hpp"
#include "batchband/policies.hpp"
#include "oracles.hpp"

using namespace batchband;

namespace {

std::vector<HistoryEntry> random_entries(std::size_t count, std::size_t k, std::size_t p,
                                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<HistoryEntry> out;
  for (std::size_t i = 0; i < count; ++i) {
    HistoryEntry e;
    e.t = static_cast<Timestep>(i + 1);
    e.action = static_cast<ActionIndex>(rng.next() % k);
    e.reward = rng.bernoulli(0.4) ? 1.0 : 0.0;
    for (std::size_t j = 0; j < p; ++j) e.context.push_back(rng.normal());
    out.push_back(e);
  }
  return out;
}

}  // namespace

TEST_CASE("UCB pulls every arm once, lowest index first") {
  UcbPolicy ucb(3);
  Rng rng(0);
  CHECK(ucb.decide({1}, rng)[0] == 1.0);
  ucb.update(HistoryEntry{1, 0, 0.0, {}});
  CHECK(ucb.decide({2}, rng)[1] == 1.0);
  ucb.update(HistoryEntry{2, 1, 0.0, {}});
  CHECK(ucb.decide({3}, rng)[2] == 1.0);
}

TEST_CASE("UCB index at s = 3 after one pull per arm") {
  UcbPolicy ucb(2);
  ucb.update(std::vector<HistoryEntry>{{1, 0, 1.0, {}}, {2, 1, 0.0, {}}});
  const auto idx = ucb.indices();
  CHECK(idx[0] == doctest::Approx(oracle::ucb_index(1.0, 1, 3.0, 2.0)).epsilon(1e-14));
  CHECK(idx[1] == doctest::Approx(oracle::ucb_index(0.0, 1, 3.0, 2.0)).epsilon(1e-14));
  CHECK(idx[0] == doctest::Approx(1.0 + std::sqrt(2.0 * std::log(3.0))));
  Rng rng(0);
  CHECK(ucb.decide({3}, rng)[0] == 1.0);
}

TEST_CASE("UCB breaks index ties toward the lowest arm and ignores the rng") {
  UcbPolicy ucb(3);
  ucb.update(std::vector<HistoryEntry>{{1, 0, 1.0, {}}, {2, 1, 1.0, {}}, {3, 2, 1.0, {}}});
  Rng a(1), b(2);
  CHECK(ucb.decide({4}, a) == ucb.decide({4}, b));
  CHECK(ucb.decide({4}, a)[0] == 1.0);
  CHECK_FALSE(ucb.randomized());
}

TEST_CASE("UCB indices match the oracle on random histories") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto entries = random_entries(200, 4, 0, seed);
    UcbPolicy ucb(4, 1.5);
    ucb.update(entries);
    const auto s = summarize(entries, 4);
    const auto idx = ucb.indices();
    for (std::size_t a = 0; a < 4; ++a) {
      if (s.counts[a] == 0) continue;
      CHECK(idx[a] ==
            doctest::Approx(oracle::ucb_index(s.means[a], s.counts[a], 201.0, 1.5)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Thompson sampling posterior updates and concentration") {
  ThompsonBetaPolicy ts(2);
  ts.update(std::vector<HistoryEntry>{{1, 0, 1.0, {}}, {2, 0, 0.0, {}}, {3, 1, 1.0, {}}});
  CHECK(ts.alpha()[0] == 2.0);
  CHECK(ts.beta()[0] == 2.0);
  CHECK(ts.alpha()[1] == 2.0);
  CHECK(ts.beta()[1] == 1.0);
  CHECK(ts.randomized());

  const ThompsonBetaPolicy sharp({1000.0, 1.0}, {1.0, 1000.0});
  Rng rng(17);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) hits += sharp.decide({1}, rng)[0] == 1.0 ? 1 : 0;
  CHECK(hits >= 990);

  CHECK_THROWS_AS(ThompsonBetaPolicy({1.0, 0.0}, {1.0, 1.0}), InvalidArgumentError);
  CHECK_THROWS_AS(ThompsonBetaPolicy({1.0}, {1.0, 1.0}), DimensionMismatchError);
}

TEST_CASE("Thompson sampling on a flat prior picks each arm about equally") {
  const ThompsonBetaPolicy ts(2);
  Rng rng(5);
  int first = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) first += ts.decide({1}, rng)[0] == 1.0 ? 1 : 0;
  CHECK(std::abs(first / double(draws) - 0.5) < 0.02);
}

TEST_CASE("LinUCB ridge statistics") {
  LinUcbPolicy lin(2, 1, 1.0, 1.0);
  lin.update(HistoryEntry{1, 0, 1.0, {1.0}});
  Eigen::MatrixXd expected_v(2, 2);
  expected_v << 2, 0, 0, 1;
  CHECK((lin.design_matrix() - expected_v).norm() == doctest::Approx(0.0));
  CHECK(lin.response()[0] == 1.0);
  CHECK(lin.response()[1] == 0.0);
  CHECK(lin.estimate()[0] == doctest::Approx(0.5));
  CHECK(lin.estimate()[1] == doctest::Approx(0.0));

  Rng rng(0);
  const double ctx[] = {1.0};
  // Scores 0.5 + 1/sqrt(2) versus 0 + 1: arm 0 wins.
  CHECK(lin.decide({2, ctx}, rng)[0] == 1.0);
}

TEST_CASE("LinUCB with an empty context uses the constant feature") {
  LinUcbPolicy lin(2, 1);
  lin.update(HistoryEntry{1, 1, 1.0, {}});
  CHECK(lin.design_matrix()(1, 1) == 2.0);
  CHECK(lin.estimate()[1] == doctest::Approx(0.5));
}

TEST_CASE("linear estimate solves the normal equations") {
  const std::size_t k = 3, p = 2;
  const auto entries = random_entries(300, k, p, 8);
  LinTsPolicy lin(k, p, 0.5);
  lin.update(entries);
  Eigen::MatrixXd v = 0.5 * Eigen::MatrixXd::Identity(6, 6);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(6);
  for (const auto& e : entries) {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(6);
    for (std::size_t j = 0; j < p; ++j) psi[static_cast<Eigen::Index>(e.action * p + j)] = e.context[j];
    v += psi * psi.transpose();
    z += psi * e.reward;
  }
  const Eigen::VectorXd theta = v.fullPivLu().solve(z);
  CHECK((lin.estimate() - theta).norm() < 1e-10);
}

TEST_CASE("updates do not depend on how entries are grouped") {
  const auto entries = random_entries(120, 3, 2, 4);
  const std::vector<std::unique_ptr<Policy>> prototypes = [] {
    std::vector<std::unique_ptr<Policy>> v;
    v.push_back(std::make_unique<UcbPolicy>(3));
    v.push_back(std::make_unique<ThompsonBetaPolicy>(3));
    v.push_back(std::make_unique<LinUcbPolicy>(3, 2));
    v.push_back(std::make_unique<LinTsPolicy>(3, 2));
    return v;
  }();
  const double ctx[] = {0.3, -0.8};
  for (const auto& proto : prototypes) {
    auto whole = proto->clone();
    whole->update(entries);
    auto single = proto->clone();
    for (const auto& e : entries) single->update(e);
    auto chunked = proto->clone();
    for (std::size_t i = 0; i < entries.size(); i += 7) {
      chunked->update(std::span(entries).subspan(i, std::min<std::size_t>(7, entries.size() - i)));
    }
    CHECK(whole->observations() == 120);
    CHECK(single->observations() == 120);
    for (int trial = 0; trial < 20; ++trial) {
      Rng r1(trial), r2(trial), r3(trial);
      const auto a = whole->decide({121, ctx}, r1);
      CHECK(a == single->decide({121, ctx}, r2));
      CHECK(a == chunked->decide({121, ctx}, r3));
    }
  }
}

TEST_CASE("reference policies") {
  const auto u = uniform_policy(4);
  Rng rng(0);
  CHECK(u.decide({1}, rng)[2] == doctest::Approx(0.25));
  CHECK(u.name() == "uniform");

  const TwoPhasePolicy two(2, 0, 1, 5);
  CHECK(two.decide({5}, rng)[0] == 1.0);
  CHECK(two.decide({6}, rng)[1] == 1.0);
}

TEST_CASE("policy factory") {
  const auto env = preset("env4");
  PolicyConfig cfg;
  for (const auto& name : policy_names()) {
    cfg.name = name;
    const auto p = make_policy(cfg, env, 100);
    CHECK(p->name() == name);
    CHECK(p->num_arms() == 4);
  }
  cfg.name = "best";
  Rng rng(0);
  CHECK(make_policy(cfg, env, 100)->decide({1}, rng)[3] == 1.0);
  cfg.name = "worst";
  CHECK(make_policy(cfg, env, 100)->decide({1}, rng)[1] == 1.0);

  cfg.name = "greedy";
  CHECK_THROWS_AS(make_policy(cfg, env, 100), ConfigError);
  cfg.name = "ucb";
  cfg.ucb_c = 0.0;
  CHECK_THROWS_AS(make_policy(cfg, env, 100), ConfigError);
  cfg = PolicyConfig{};
  cfg.name = "linucb";
  cfg.ridge_lambda = -1.0;
  CHECK_THROWS_AS(make_policy(cfg, env, 100), ConfigError);

  const auto lin_env = LinearContextualEnv::random(2, 3, 1);
  cfg = PolicyConfig{};
  cfg.name = "best";
  CHECK_THROWS_AS(make_policy(cfg, lin_env, 100), ConfigError);
  cfg.name = "lints";
  CHECK(make_policy(cfg, lin_env, 100)->num_arms() == 3);
}

TEST_CASE("policies reject out-of-range actions") {
  UcbPolicy ucb(2);
  CHECK_THROWS_AS(ucb.update(HistoryEntry{1, 2, 1.0, {}}), InvalidArgumentError);
  CHECK(ucb.observations() == 0);
}
