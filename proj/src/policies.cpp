#include "batchband/policies.hpp"

#include <algorithm>
#include <cmath>

#include "batchband/error.hpp"

namespace batchband {

namespace {

// Point mass on the lowest-index maximizer.
DecisionRule greedy(std::span<const double> scores) {
  return DecisionRule::point_mass(scores.size(), argmax(scores));
}

}  // namespace

Policy::Policy(std::size_t num_arms) : num_arms_(num_arms) {
  if (num_arms_ == 0) throw InvalidArgumentError("policy over an empty action set");
}

void Policy::update(std::span<const HistoryEntry> entries) {
  for (const auto& e : entries) {
    if (e.action >= num_arms_) {
      throw InvalidArgumentError("entry action " + std::to_string(e.action) +
                                 " out of range for K = " + std::to_string(num_arms_));
    }
  }
  absorb(entries);
  observations_ += static_cast<Timestep>(entries.size());
}

// --- UCB ---------------------------------------------------------------------

UcbPolicy::UcbPolicy(std::size_t num_arms, double c)
    : Policy(num_arms), c_(c), counts_(num_arms, 0), sums_(num_arms, 0.0) {
  if (!(c > 0.0)) throw InvalidArgumentError("ucb_c must be positive");
}

void UcbPolicy::absorb(std::span<const HistoryEntry> entries) {
  for (const auto& e : entries) {
    ++counts_[e.action];
    sums_[e.action] += e.reward;
  }
}

std::vector<double> UcbPolicy::means() const {
  std::vector<double> m(num_arms(), 0.0);
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (counts_[a] > 0) m[a] = sums_[a] / static_cast<double>(counts_[a]);
  }
  return m;
}

std::vector<double> UcbPolicy::indices() const {
  const double log_clock = std::log(static_cast<double>(observations() + 1));
  std::vector<double> idx(num_arms());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (counts_[a] == 0) {
      idx[a] = HUGE_VAL;
      continue;
    }
    const double n = static_cast<double>(counts_[a]);
    idx[a] = sums_[a] / n + std::sqrt(c_ * log_clock / n);
  }
  return idx;
}

DecisionRule UcbPolicy::decide(const Round&, Rng&) const {
  for (std::size_t a = 0; a < num_arms(); ++a) {
    if (counts_[a] == 0) return DecisionRule::point_mass(num_arms(), a);
  }
  return greedy(indices());
}

// --- Thompson sampling ---------------------------------------------------------

ThompsonBetaPolicy::ThompsonBetaPolicy(std::size_t num_arms)
    : Policy(num_arms), alpha_(num_arms, 1.0), beta_(num_arms, 1.0) {}

ThompsonBetaPolicy::ThompsonBetaPolicy(std::vector<double> alpha, std::vector<double> beta)
    : Policy(alpha.size()), alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (alpha_.size() != beta_.size()) throw DimensionMismatchError("alpha and beta differ in size");
  for (std::size_t a = 0; a < alpha_.size(); ++a) {
    if (!(alpha_[a] > 0.0) || !(beta_[a] > 0.0)) {
      throw InvalidArgumentError("Beta parameters must be positive");
    }
  }
}

void ThompsonBetaPolicy::absorb(std::span<const HistoryEntry> entries) {
  for (const auto& e : entries) {
    alpha_[e.action] += e.reward;
    beta_[e.action] += 1.0 - e.reward;
  }
}

DecisionRule ThompsonBetaPolicy::decide(const Round&, Rng& rng) const {
  std::vector<double> draws(num_arms());
  for (std::size_t a = 0; a < draws.size(); ++a) draws[a] = rng.beta(alpha_[a], beta_[a]);
  return greedy(draws);
}

// --- linear models -------------------------------------------------------------

LinearModelPolicy::LinearModelPolicy(std::size_t num_arms, std::size_t context_dim,
                                     double ridge_lambda)
    : Policy(num_arms), context_dim_(context_dim) {
  if (context_dim_ == 0) throw InvalidArgumentError("linear policy needs context_dim >= 1");
  if (!(ridge_lambda > 0.0)) throw InvalidArgumentError("ridge_lambda must be positive");
  const auto d = static_cast<Eigen::Index>(context_dim_ * num_arms);
  design_ = ridge_lambda * Eigen::MatrixXd::Identity(d, d);
  response_ = Eigen::VectorXd::Zero(d);
  estimate_ = Eigen::VectorXd::Zero(d);
  factor_.compute(design_);
}

Eigen::VectorXd LinearModelPolicy::features(std::span<const double> context,
                                            ActionIndex arm) const {
  static constexpr double kConstantContext[] = {1.0};
  if (context.empty()) context = kConstantContext;
  if (context.size() != context_dim_) {
    throw DimensionMismatchError("context has dimension " + std::to_string(context.size()) +
                                 ", policy expects " + std::to_string(context_dim_));
  }
  const auto psi = block_features(context, arm, num_arms());
  return Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
}

void LinearModelPolicy::absorb(std::span<const HistoryEntry> entries) {
  if (entries.empty()) return;
  for (const auto& e : entries) {
    const Eigen::VectorXd psi = features(e.context, e.action);
    design_.noalias() += psi * psi.transpose();
    response_ += e.reward * psi;
  }
  factor_.compute(design_);
  estimate_ = factor_.solve(response_);
}

LinUcbPolicy::LinUcbPolicy(std::size_t num_arms, std::size_t context_dim, double ridge_lambda,
                           double alpha)
    : LinearModelPolicy(num_arms, context_dim, ridge_lambda), alpha_(alpha) {
  if (!(alpha >= 0.0)) throw InvalidArgumentError("linucb_alpha must be non-negative");
}

DecisionRule LinUcbPolicy::decide(const Round& round, Rng&) const {
  std::vector<double> scores(num_arms());
  for (std::size_t a = 0; a < scores.size(); ++a) {
    const Eigen::VectorXd psi = features(round.context, a);
    const Eigen::VectorXd whitened = factor_.matrixL().solve(psi);
    scores[a] = psi.dot(estimate()) + alpha_ * whitened.norm();
  }
  return greedy(scores);
}

LinTsPolicy::LinTsPolicy(std::size_t num_arms, std::size_t context_dim, double ridge_lambda)
    : LinearModelPolicy(num_arms, context_dim, ridge_lambda) {}

DecisionRule LinTsPolicy::decide(const Round& round, Rng& rng) const {
  const Eigen::Index d = estimate().size();
  Eigen::VectorXd noise(d);
  for (Eigen::Index i = 0; i < d; ++i) noise[i] = rng.normal();
  // V = L L^T, so L^{-T} xi has covariance V^{-1}.
  const Eigen::VectorXd sample = estimate() + factor_.matrixU().solve(noise);
  std::vector<double> scores(num_arms());
  for (std::size_t a = 0; a < scores.size(); ++a) {
    scores[a] = features(round.context, a).dot(sample);
  }
  return greedy(scores);
}

// --- reference policies --------------------------------------------------------

FixedRulePolicy::FixedRulePolicy(DecisionRule rule, std::string name)
    : Policy(rule.size()), rule_(std::move(rule)), name_(std::move(name)) {}

FixedRulePolicy uniform_policy(std::size_t num_arms) {
  return FixedRulePolicy(DecisionRule::uniform(num_arms), "uniform");
}

TwoPhasePolicy::TwoPhasePolicy(std::size_t num_arms, ActionIndex good, ActionIndex bad,
                               Timestep switch_after)
    : Policy(num_arms), good_(good), bad_(bad), switch_after_(switch_after) {
  if (good >= num_arms || bad >= num_arms) throw InvalidArgumentError("arm out of range");
}

DecisionRule TwoPhasePolicy::decide(const Round& round, Rng&) const {
  return DecisionRule::point_mass(num_arms(), round.t <= switch_after_ ? good_ : bad_);
}

std::vector<std::string> policy_names() {
  return {"ucb", "ts", "linucb", "lints", "uniform", "best", "worst", "two_phase"};
}

std::unique_ptr<Policy> make_learning_policy(const PolicyConfig& config, std::size_t num_arms,
                                             std::size_t context_dim) {
  const std::size_t p = context_dim == 0 ? 1 : context_dim;
  try {
    if (config.name == "ucb") return std::make_unique<UcbPolicy>(num_arms, config.ucb_c);
    if (config.name == "ts") return std::make_unique<ThompsonBetaPolicy>(num_arms);
    if (config.name == "linucb") {
      return std::make_unique<LinUcbPolicy>(num_arms, p, config.ridge_lambda, config.linucb_alpha);
    }
    if (config.name == "lints") {
      return std::make_unique<LinTsPolicy>(num_arms, p, config.ridge_lambda);
    }
    if (config.name == "uniform") return std::make_unique<FixedRulePolicy>(uniform_policy(num_arms));
  } catch (const InvalidArgumentError& e) {
    throw ConfigError("policy '" + config.name + "': " + e.what());
  }
  throw ConfigError("unknown or unsupported policy '" + config.name +
                    "'; expected ucb, ts, linucb, lints or uniform");
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const Environment& env,
                                    Timestep horizon) {
  const std::size_t k = env.num_arms();
  const bool reference =
      config.name == "best" || config.name == "worst" || config.name == "two_phase";
  if (!reference) {
    const auto names = policy_names();
    if (std::find(names.begin(), names.end(), config.name) == names.end()) {
      std::string valid;
      for (const auto& name : names) valid += (valid.empty() ? "" : ", ") + name;
      throw ConfigError("unknown policy '" + config.name + "'; valid policies: " + valid);
    }
    return make_learning_policy(config, k, env.context_dim());
  }
  if (env.context_dim() != 0) {
    throw ConfigError("policy '" + config.name + "' needs a non-contextual environment");
  }
  const ActionIndex best = env.best_arm({});
  ActionIndex worst = 0;
  for (ActionIndex a = 1; a < k; ++a) {
    if (env.mean_reward({}, a) < env.mean_reward({}, worst)) worst = a;
  }
  if (config.name == "best") {
    return std::make_unique<FixedRulePolicy>(DecisionRule::point_mass(k, best), "best");
  }
  if (config.name == "worst") {
    return std::make_unique<FixedRulePolicy>(DecisionRule::point_mass(k, worst), "worst");
  }
  return std::make_unique<TwoPhasePolicy>(k, best, worst, horizon / 2);
}

}  // namespace batchband
