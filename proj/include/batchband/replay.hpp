#pragma once

// Offline replay evaluation on logged bandit data. A record counts only when
// the policy picks the logged action; batch boundaries count matched records.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "batchband/environments.hpp"
#include "batchband/policies.hpp"

namespace batchband {

// Rewards at or above this count as a successful interaction.
inline constexpr double kSuccessThreshold = 0.5;

struct ReplayResult {
  std::string policy;
  Timestep b = 1;
  std::size_t matched = 0;
  std::size_t successes = 0;
  // successes / matched; empty when nothing matched.
  std::optional<double> cr;
  std::optional<double> relative_cr;
};

// Throws DataError for records whose action is out of range (with the CSV
// line number) and InvalidArgumentError for an empty dataset or b < 1.
ReplayResult replay_evaluate(const Policy& policy, std::span<const LoggedRecord> dataset,
                             Timestep b, std::uint64_t seed);

// cr / baseline.cr. Throws InvalidArgumentError when either is undefined or
// the baseline is zero.
double relative_cr(const ReplayResult& result, const ReplayResult& baseline);

// policy,b,matched,successes,cr,relative_cr; undefined values are left empty.
void write_replay_csv(std::ostream& out, std::span<const ReplayResult> results);

}  // namespace batchband
