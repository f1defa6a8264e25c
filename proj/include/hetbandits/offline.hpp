#pragma once

// Offline replay of implicit-feedback logs.
//
// Items file: one item per line, `id,x1,...,xd`, all rows the same width.
// Interactions file: one positive per line, `user,item`.
// Blank lines and lines starting with '#' are ignored in both.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hetbandits/env.hpp"
#include "hetbandits/trace.hpp"

namespace hetbandits {

struct OfflineDataset {
  std::map<std::string, Vector> items;
  std::map<std::string, std::set<std::string>> positives;

  std::size_t dim() const { return items.empty() ? 0 : items.begin()->second.size(); }
};

// Throws ParseError (with line number), MissingItem or IoError.
OfflineDataset load_offline(const std::filesystem::path& items_path,
                            const std::filesystem::path& interactions_path);
OfflineDataset parse_offline(std::istream& items, std::istream& interactions);

// Agents are the dataset's users in id order. Each round shows K distinct
// items drawn uniformly; the reward is 1 iff the item is among the acting
// user's positives.
class OfflineEnvironment : public Environment {
 public:
  OfflineEnvironment(const OfflineDataset& dataset, std::size_t k_arms,
                     std::uint64_t candidate_seed);

  std::size_t n_agents() const override { return positives_.size(); }
  std::size_t dim() const override { return dim_; }
  std::size_t k_arms() const override { return k_arms_; }

  ContextBatch contexts(std::int64_t round) const override;
  double reward(std::size_t agent, const ContextBatch& batch,
                std::size_t arm) const override;
  // Best reward available in the candidate set minus the reward obtained.
  double regret(std::size_t agent, const ContextBatch& batch,
                std::size_t arm) const override;

  const std::vector<std::string>& user_ids() const { return user_ids_; }

 private:
  std::vector<Vector> embeddings_;
  std::vector<std::string> user_ids_;
  std::vector<std::set<std::size_t>> positives_;
  std::size_t dim_;
  std::size_t k_arms_;
  std::uint64_t candidate_seed_;
};

struct ReplayResult {
  RegretTrace algorithm;
  RegretTrace random;
  // Per round: total cumulative regret of each policy over all users.
  std::vector<double> algorithm_cum;
  std::vector<double> random_cum;
  // algorithm_cum / random_cum; 1 when both are 0, +inf when only the
  // denominator is.
  std::vector<double> ratio;
};

using PolicyRunner = std::function<RegretTrace(const Environment&)>;

// Runs `policy` and a uniform random policy (streams keyed by
// baseline_policy_seed) on the same candidate sequence.
ReplayResult offline_replay(const OfflineEnvironment& env, const PolicyRunner& policy,
                            std::int64_t horizon, std::uint64_t baseline_policy_seed);

inline constexpr std::string_view kReplayHeader =
    "round,algo_cum_regret,random_cum_regret,ratio";
void write_replay_csv(const std::filesystem::path& path, const ReplayResult& result);

}  // namespace hetbandits
