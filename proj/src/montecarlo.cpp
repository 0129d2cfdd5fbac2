#include "batchband/montecarlo.hpp"

#include <algorithm>

#include "batchband/parallel.hpp"

namespace batchband {

std::vector<double> final_regrets(const Policy& policy, const Environment& env,
                                  const BatchGrid& grid, Specification spec, std::size_t reps,
                                  std::uint64_t master_seed, std::string_view key,
                                  unsigned threads) {
  const auto chunks = parallel_map(num_chunks(reps), threads, [&](std::size_t c) {
    std::vector<double> out;
    const std::size_t end = std::min(reps, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      out.push_back(
          run_specification(policy, env, grid, spec, derive_seed(master_seed, key, i))
              .final_regret());
    }
    return out;
  });
  std::vector<double> values;
  values.reserve(reps);
  for (const auto& chunk : chunks) values.insert(values.end(), chunk.begin(), chunk.end());
  return values;
}

}  // namespace batchband
