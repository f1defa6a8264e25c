#include "hetbandits/offline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "hetbandits/baselines.hpp"
#include "hetbandits/errors.hpp"
#include "text.hpp"

namespace hetbandits {
namespace {

bool skip_line(std::string_view line) {
  const auto t = detail::trim(line);
  return t.empty() || t.front() == '#';
}

std::vector<double> cumulative_totals(const RegretTrace& trace) {
  std::vector<double> out(trace.n_rounds(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    double s = 0.0;
    for (std::size_t a = 0; a < trace.n_agents(); ++a) s += trace.at(a, r).cum_regret;
    out[r] = s;
  }
  return out;
}

}  // namespace

OfflineDataset parse_offline(std::istream& items, std::istream& interactions) {
  OfflineDataset ds;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(items, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = detail::split(detail::trim(line), ',');
    if (fields.size() < 2) throw ParseError("items", line_no, "expected id and embedding");
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim) {
      throw ParseError("items", line_no,
                       "expected " + std::to_string(dim) + " embedding values");
    }
    Vector emb(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!detail::parse_number(fields[j + 1], emb[j]) || !std::isfinite(emb[j])) {
        throw ParseError("items", line_no, "bad embedding value");
      }
    }
    std::string id(fields[0]);
    if (id.empty()) throw ParseError("items", line_no, "empty item id");
    if (!ds.items.emplace(id, std::move(emb)).second) {
      throw ParseError("items", line_no, "duplicate item id '" + id + "'");
    }
  }

  line_no = 0;
  while (std::getline(interactions, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = detail::split(detail::trim(line), ',');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("interactions", line_no, "expected 'user,item'");
    }
    std::string item(fields[1]);
    if (!ds.items.contains(item)) throw MissingItem(item);
    ds.positives[std::string(fields[0])].insert(std::move(item));
  }
  return ds;
}

OfflineDataset load_offline(const std::filesystem::path& items_path,
                            const std::filesystem::path& interactions_path) {
  std::ifstream items(items_path);
  if (!items) throw IoError("cannot open " + items_path.string());
  std::ifstream interactions(interactions_path);
  if (!interactions) throw IoError("cannot open " + interactions_path.string());
  return parse_offline(items, interactions);
}

// -- OfflineEnvironment -------------------------------------------------------

OfflineEnvironment::OfflineEnvironment(const OfflineDataset& dataset, std::size_t k_arms,
                                       std::uint64_t candidate_seed)
    : dim_(dataset.dim()), k_arms_(k_arms), candidate_seed_(candidate_seed) {
  if (dataset.positives.empty()) throw InvalidSpec("offline dataset has no users");
  if (k_arms == 0 || k_arms > dataset.items.size()) {
    throw InvalidSpec("arm count must be in [1, number of items]");
  }
  std::map<std::string, std::size_t> index;
  for (const auto& [id, emb] : dataset.items) {
    index.emplace(id, embeddings_.size());
    embeddings_.push_back(emb);
  }
  for (const auto& [user, items] : dataset.positives) {
    user_ids_.push_back(user);
    std::set<std::size_t> idx;
    for (const auto& item : items) idx.insert(index.at(item));
    positives_.push_back(std::move(idx));
  }
}

ContextBatch OfflineEnvironment::contexts(std::int64_t round) const {
  SplitMix64 rng(derive_seed(candidate_seed_, static_cast<std::uint64_t>(round)));
  std::uniform_int_distribution<std::size_t> pick(0, embeddings_.size() - 1);
  ContextBatch batch;
  batch.round = round;
  while (batch.items.size() < k_arms_) {
    const std::size_t item = pick(rng);
    if (std::find(batch.items.begin(), batch.items.end(), item) != batch.items.end()) {
      continue;
    }
    batch.items.push_back(item);
    batch.contexts.push_back(embeddings_[item]);
  }
  return batch;
}

double OfflineEnvironment::reward(std::size_t agent, const ContextBatch& batch,
                                  std::size_t arm) const {
  return positives_.at(agent).contains(batch.items.at(arm)) ? 1.0 : 0.0;
}

double OfflineEnvironment::regret(std::size_t agent, const ContextBatch& batch,
                                  std::size_t arm) const {
  double best = 0.0;
  for (std::size_t j = 0; j < batch.k(); ++j) best = std::max(best, reward(agent, batch, j));
  return best - reward(agent, batch, arm);
}

// -- replay -------------------------------------------------------------------

ReplayResult offline_replay(const OfflineEnvironment& env, const PolicyRunner& policy,
                            std::int64_t horizon, std::uint64_t baseline_policy_seed) {
  ReplayResult out;
  out.algorithm = policy(env);
  BaselineConfig random_config;
  random_config.horizon = horizon;
  out.random = uniform_random_run(random_config, env, baseline_policy_seed);

  out.algorithm_cum = cumulative_totals(out.algorithm);
  out.random_cum = cumulative_totals(out.random);
  const std::size_t rounds = std::min(out.algorithm_cum.size(), out.random_cum.size());
  out.ratio.resize(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const double num = out.algorithm_cum[r];
    const double den = out.random_cum[r];
    if (den == 0.0) {
      out.ratio[r] = num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      out.ratio[r] = num / den;
    }
  }
  return out;
}

void write_replay_csv(const std::filesystem::path& path, const ReplayResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kReplayHeader << '\n';
  for (std::size_t r = 0; r < result.ratio.size(); ++r) {
    out << (r + 1) << ',' << format_double(result.algorithm_cum[r]) << ','
        << format_double(result.random_cum[r]) << ',' << format_double(result.ratio[r])
        << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace hetbandits
