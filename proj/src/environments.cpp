#include "batchband/environments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <utility>

#include "batchband/csv.hpp"
#include "batchband/error.hpp"

namespace batchband {

namespace {

struct PresetDef {
  std::string_view name;
  std::vector<double> means;
};

const std::vector<PresetDef>& presets() {
  static const std::vector<PresetDef> table = {
      {"env1", {0.7, 0.5}},
      {"env2", {0.7, 0.4}},
      {"env3", {0.7, 0.1}},
      {"env4", {0.35, 0.18, 0.47, 0.61}},
      {"env5", {0.40, 0.75, 0.57, 0.49}},
      {"env6", {0.70, 0.50, 0.30, 0.10}},
  };
  return table;
}

std::string join_means(std::span<const double> means) {
  std::string out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (i > 0) out += '/';
    out += format_double(means[i]);
  }
  return out;
}

}  // namespace

double Environment::gap(std::span<const double> context, ActionIndex arm) const {
  return mean_reward(context, best_arm(context)) - mean_reward(context, arm);
}

ActionIndex Environment::best_arm(std::span<const double> context) const {
  ActionIndex best = 0;
  double best_mean = mean_reward(context, 0);
  for (ActionIndex a = 1; a < num_arms(); ++a) {
    const double m = mean_reward(context, a);
    if (m > best_mean) {
      best = a;
      best_mean = m;
    }
  }
  return best;
}

BernoulliEnv::BernoulliEnv(std::vector<double> means, std::string name)
    : means_(std::move(means)), name_(std::move(name)) {
  if (means_.size() < 2) throw InvalidArgumentError("a Bernoulli bandit needs at least 2 arms");
  for (double m : means_) {
    if (!(m >= 0.0 && m <= 1.0)) throw InvalidArgumentError("Bernoulli means must lie in [0, 1]");
  }
  best_ = argmax(means_);
  gaps_.resize(means_.size());
  for (std::size_t a = 0; a < means_.size(); ++a) gaps_[a] = means_[best_] - means_[a];
  if (name_.empty()) name_ = join_means(means_);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.emplace_back(p.name);
  return names;
}

BernoulliEnv preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return BernoulliEnv(p.means, std::string(p.name));
  }
  std::string valid;
  for (const auto& p : presets()) {
    if (!valid.empty()) valid += ", ";
    valid += p.name;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'; valid presets: " + valid);
}

BernoulliEnv parse_env(std::string_view spec) {
  if (spec.find('/') == std::string_view::npos) return preset(spec);
  std::vector<double> means;
  for (const auto& field : split(spec, '/')) {
    double v = 0.0;
    if (!parse_double(field, v)) {
      throw ConfigError("cannot parse inline means '" + std::string(spec) + "'");
    }
    means.push_back(v);
  }
  try {
    return BernoulliEnv(std::move(means));
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(std::string("invalid inline environment: ") + e.what());
  }
}

std::vector<double> gaps(const BernoulliEnv& env) {
  return {env.gaps().begin(), env.gaps().end()};
}

std::vector<double> block_features(std::span<const double> context, ActionIndex arm,
                                   std::size_t num_arms) {
  const std::size_t p = context.size();
  std::vector<double> psi(p * num_arms, 0.0);
  std::copy(context.begin(), context.end(), psi.begin() + static_cast<std::ptrdiff_t>(arm * p));
  return psi;
}

std::vector<double> unit_sphere_draw(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

LinearContextualEnv::LinearContextualEnv(Instance theta, std::size_t context_dim,
                                         std::size_t num_arms)
    : theta_(std::move(theta)), context_dim_(context_dim), num_arms_(num_arms) {
  if (context_dim_ == 0 || num_arms_ < 2) {
    throw InvalidArgumentError("linear environment needs p >= 1 and K >= 2");
  }
  if (theta_.dim() != context_dim_ * num_arms_) {
    throw DimensionMismatchError("theta must have dimension p*K = " +
                                 std::to_string(context_dim_ * num_arms_));
  }
  if (theta_.norm() > 1.0 + 1e-9) throw InvalidArgumentError("||theta||_2 must be at most 1");
}

LinearContextualEnv LinearContextualEnv::random(std::size_t context_dim, std::size_t num_arms,
                                                std::uint64_t seed) {
  Rng rng(seed);
  return LinearContextualEnv(Instance::linear(unit_sphere_draw(context_dim * num_arms, rng)),
                             context_dim, num_arms);
}

std::vector<double> LinearContextualEnv::draw_context(Rng& rng) const {
  return unit_sphere_draw(context_dim_, rng);
}

double LinearContextualEnv::mean_reward(std::span<const double> context, ActionIndex arm) const {
  if (context.size() != context_dim_) {
    throw DimensionMismatchError("context has dimension " + std::to_string(context.size()) +
                                 ", expected " + std::to_string(context_dim_));
  }
  // <theta, psi(c, arm)> touches only the arm's block.
  const auto block = theta_.theta().subspan(arm * context_dim_, context_dim_);
  double v = 0.0;
  for (std::size_t i = 0; i < context_dim_; ++i) v += block[i] * context[i];
  return v;
}

double LinearContextualEnv::sample_reward(std::span<const double> context, ActionIndex arm,
                                          Rng& rng) const {
  return mean_reward(context, arm) + rng.normal();
}

std::string LinearContextualEnv::name() const {
  return "linear_p" + std::to_string(context_dim_) + "_k" + std::to_string(num_arms_);
}

std::vector<LoggedRecord> synth_logged_dataset(const Environment& env,
                                               const DecisionRule& logging_rule,
                                               std::size_t n_records, std::uint64_t seed) {
  if (logging_rule.size() != env.num_arms()) {
    throw DimensionMismatchError("logging rule does not match the number of arms");
  }
  if (n_records == 0) throw InvalidArgumentError("dataset must have at least one record");
  Rng env_rng = Rng::stream(seed, 0);
  Rng log_rng = Rng::stream(seed, 2);
  std::vector<LoggedRecord> records;
  records.reserve(n_records);
  for (std::size_t i = 0; i < n_records; ++i) {
    LoggedRecord r;
    r.context = env.draw_context(env_rng);
    r.action = logging_rule.sample(log_rng);
    r.reward = env.sample_reward(r.context, r.action, env_rng);
    r.logging_prob = logging_rule[r.action];
    records.push_back(std::move(r));
  }
  return records;
}

void write_logged_csv(std::ostream& out, std::span<const LoggedRecord> records) {
  const std::size_t p = records.empty() ? 0 : records.front().context.size();
  for (std::size_t i = 0; i < p; ++i) out << "context_" << i << ',';
  out << "action,reward,logging_prob\n";
  for (const auto& r : records) {
    if (r.context.size() != p) throw DataError("records have inconsistent context dimensions");
    for (double c : r.context) out << format_double(c) << ',';
    out << r.action << ',' << format_double(r.reward) << ',' << format_double(r.logging_prob)
        << '\n';
  }
}

std::vector<LoggedRecord> read_logged_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("line 1: empty logged-data file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  if (header.size() < 3 || header[header.size() - 3] != "action" ||
      header[header.size() - 2] != "reward" || header.back() != "logging_prob") {
    throw DataError("line 1: header must end with action,reward,logging_prob");
  }
  const std::size_t p = header.size() - 3;
  for (std::size_t i = 0; i < p; ++i) {
    if (header[i] != "context_" + std::to_string(i)) {
      throw DataError("line 1: expected column context_" + std::to_string(i));
    }
  }
  std::vector<LoggedRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    const auto fail = [&](const std::string& what) {
      return DataError("line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != p + 3) throw fail("expected " + std::to_string(p + 3) + " fields");
    LoggedRecord r;
    r.context.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
      if (!parse_double(fields[i], r.context[i])) throw fail("bad context value");
    }
    if (!parse_size(fields[p], r.action)) throw fail("bad action");
    if (!parse_double(fields[p + 1], r.reward)) throw fail("bad reward");
    if (!parse_double(fields[p + 2], r.logging_prob) || !(r.logging_prob > 0.0) ||
        r.logging_prob > 1.0) {
      throw fail("logging_prob must lie in (0, 1]");
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace batchband
