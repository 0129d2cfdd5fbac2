#include <doctest.h>

#include <sstream>

#include "batchband/environments.hpp"
#include "batchband/error.hpp"
#include "oracles.hpp"

using namespace batchband;

TEST_CASE("presets carry the reference means") {
  const auto names = preset_names();
  REQUIRE(names.size() == 6);
  const auto& expected = oracle::reference_means();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto env = preset(names[i]);
    REQUIRE(env.num_arms() == expected[i].size());
    for (std::size_t a = 0; a < env.num_arms(); ++a) CHECK(env.means()[a] == expected[i][a]);
  }
  CHECK(preset("env1").means()[1] == 0.5);
  CHECK(preset("env4").means()[3] == 0.61);
  CHECK(preset("env6").means()[2] == 0.30);
}

TEST_CASE("unknown presets list the valid names") {
  try {
    (void)preset("env7");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("env1") != std::string::npos);
    CHECK(std::string(e.what()).find("env6") != std::string::npos);
  }
}

TEST_CASE("gaps match the oracle") {
  for (const auto& name : preset_names()) {
    const auto env = preset(name);
    const auto expected = oracle::gaps({env.means().begin(), env.means().end()});
    const auto g = gaps(env);
    int zeros = 0;
    for (std::size_t a = 0; a < g.size(); ++a) {
      CHECK(g[a] == doctest::Approx(expected[a]).epsilon(1e-12));
      if (g[a] == 0.0) ++zeros;
    }
    CHECK(zeros == 1);
  }
  const auto g4 = gaps(preset("env4"));
  CHECK(g4[0] == doctest::Approx(0.26));
  CHECK(g4[1] == doctest::Approx(0.43));
  CHECK(g4[2] == doctest::Approx(0.14));
  CHECK(gaps(preset("env3"))[1] == doctest::Approx(0.6));
}

TEST_CASE("inline environments and validation") {
  const auto env = parse_env("0.9/0.1");
  CHECK(env.num_arms() == 2);
  CHECK(env.name() == "0.9/0.1");
  CHECK_THROWS_AS(parse_env("0.9/x"), ConfigError);
  CHECK_THROWS_AS(parse_env("0.9/1.5"), ConfigError);
  CHECK_THROWS_AS(BernoulliEnv({0.5}), InvalidArgumentError);
}

TEST_CASE("Bernoulli sampling") {
  Rng rng(1);
  const BernoulliEnv sure({1.0, 0.0});
  for (int i = 0; i < 100; ++i) {
    CHECK(sure.sample_reward({}, 0, rng) == 1.0);
    CHECK(sure.sample_reward({}, 1, rng) == 0.0);
  }
  const auto env1 = preset("env1");
  Rng r(2024);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += env1.sample_reward({}, 0, r);
  CHECK(std::abs(sum / n - 0.7) <= 0.005);

  Rng a(7), b(7);
  for (int i = 0; i < 50; ++i) CHECK(env1.sample_reward({}, 1, a) == env1.sample_reward({}, 1, b));
}

TEST_CASE("linear contextual environment means are block dot products") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto env = LinearContextualEnv::random(3, 4, seed);
    CHECK(env.theta().norm() == doctest::Approx(1.0));
    Rng rng(seed + 100);
    const auto c = env.draw_context(rng);
    REQUIRE(c.size() == 3);
    for (ActionIndex a = 0; a < 4; ++a) {
      const auto psi = block_features(c, a, 4);
      double hand = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) hand += env.theta()[i] * psi[i];
      CHECK(env.mean_reward(c, a) == doctest::Approx(hand).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(LinearContextualEnv(Instance::linear({0.5, 0.5}), 2, 2), DimensionMismatchError);
  const auto env = LinearContextualEnv::random(2, 3, 4);
  CHECK_THROWS_AS(env.mean_reward(std::vector<double>{1.0}, 0), DimensionMismatchError);
  CHECK(env.name().find(',') == std::string::npos);
}

TEST_CASE("synthetic logged datasets") {
  const BernoulliEnv env3k({0.2, 0.5, 0.8});
  const auto uni = synth_logged_dataset(env3k, DecisionRule::uniform(3), 3, 5);
  for (const auto& r : uni) CHECK(r.logging_prob == doctest::Approx(1.0 / 3.0));

  const auto pm = synth_logged_dataset(env3k, DecisionRule::point_mass(3, 0), 200, 5);
  for (const auto& r : pm) CHECK(r.action == 0);

  const auto env1 = preset("env1");
  const auto big = synth_logged_dataset(env1, DecisionRule::uniform(2), 100000, 9);
  double s = 0.0;
  int n = 0;
  for (const auto& r : big) {
    if (r.action == 0) {
      s += r.reward;
      ++n;
    }
  }
  CHECK(std::abs(s / n - 0.7) <= 0.01);

  const auto again = synth_logged_dataset(env1, DecisionRule::uniform(2), 1000, 9);
  std::ostringstream x, y;
  write_logged_csv(x, std::span(big).first(1000));
  write_logged_csv(y, again);
  CHECK(x.str() == y.str());
}

TEST_CASE("logged CSV round trip and errors") {
  const auto env = LinearContextualEnv::random(2, 3, 8);
  const auto records = synth_logged_dataset(env, DecisionRule::uniform(3), 50, 1);
  std::stringstream io;
  write_logged_csv(io, records);
  const auto back = read_logged_csv(io);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].action == records[i].action);
    CHECK(back[i].reward == records[i].reward);
    CHECK(back[i].context == records[i].context);
  }

  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_logged_csv(bad_header), DataError);
  std::istringstream bad_prob("action,reward,logging_prob\n0,1,0\n");
  try {
    (void)read_logged_csv(bad_prob);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream bad_field("action,reward,logging_prob\n0,1,0.5\nx,1,0.5\n");
  try {
    (void)read_logged_csv(bad_field);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream empty("");
  CHECK_THROWS_AS(read_logged_csv(empty), DataError);
}
