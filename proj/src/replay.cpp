#include "batchband/replay.hpp"

#include <ostream>
#include <vector>

#include "batchband/csv.hpp"
#include "batchband/error.hpp"

namespace batchband {

ReplayResult replay_evaluate(const Policy& policy, std::span<const LoggedRecord> dataset,
                             Timestep b, std::uint64_t seed) {
  if (dataset.empty()) throw InvalidArgumentError("replay needs a non-empty dataset");
  if (b < 1) throw InvalidArgumentError("batch size must be at least 1");
  const std::size_t k = policy.num_arms();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].action >= k) {
      throw DataError("record " + std::to_string(i) + " (CSV line " + std::to_string(i + 2) +
                      "): action " + std::to_string(dataset[i].action) + " outside [0, " +
                      std::to_string(k) + ")");
    }
  }

  auto learner = policy.clone();
  Rng rng = Rng::stream(seed, 1);
  ReplayResult result;
  result.policy = policy.name();
  result.b = b;
  std::vector<HistoryEntry> pending;
  for (const auto& record : dataset) {
    const Timestep t = static_cast<Timestep>(result.matched) + 1;
    const ActionIndex a = learner->decide(Round{t, record.context}, rng).sample(rng);
    if (a != record.action) continue;
    ++result.matched;
    if (record.reward >= kSuccessThreshold) ++result.successes;
    pending.push_back(HistoryEntry{t, a, record.reward, record.context});
    if (pending.size() == static_cast<std::size_t>(b)) {
      learner->update(pending);
      pending.clear();
    }
  }
  if (result.matched > 0) {
    result.cr = static_cast<double>(result.successes) / static_cast<double>(result.matched);
  }
  return result;
}

double relative_cr(const ReplayResult& result, const ReplayResult& baseline) {
  if (!result.cr || !baseline.cr) throw InvalidArgumentError("conversion rate is undefined");
  if (*baseline.cr == 0.0) throw InvalidArgumentError("baseline conversion rate is zero");
  return *result.cr / *baseline.cr;
}

void write_replay_csv(std::ostream& out, std::span<const ReplayResult> results) {
  out << "policy,b,matched,successes,cr,relative_cr\n";
  for (const auto& r : results) {
    out << r.policy << ',' << r.b << ',' << r.matched << ',' << r.successes << ','
        << (r.cr ? format_double(*r.cr) : "") << ','
        << (r.relative_cr ? format_double(*r.relative_cr) : "") << '\n';
  }
}

}  // namespace batchband
