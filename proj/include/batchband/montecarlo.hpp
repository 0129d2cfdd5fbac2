#pragma once

// Repetition plumbing shared by the harness and the assumption checks.
// Repetitions run in fixed-size chunks, reduced in chunk order.

#include <cstdint>
#include <string_view>
#include <vector>

#include "batchband/core.hpp"
#include "batchband/environments.hpp"
#include "batchband/policies.hpp"
#include "batchband/specifications.hpp"

namespace batchband {

inline constexpr std::size_t kChunkSize = 25;

inline std::size_t num_chunks(std::size_t reps) { return (reps + kChunkSize - 1) / kChunkSize; }

// Final pseudo-regret of each repetition, in repetition order. Repetition i
// uses derive_seed(master_seed, key, i).
std::vector<double> final_regrets(const Policy& policy, const Environment& env,
                                  const BatchGrid& grid, Specification spec, std::size_t reps,
                                  std::uint64_t master_seed, std::string_view key,
                                  unsigned threads);

}  // namespace batchband
