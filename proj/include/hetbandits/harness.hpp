#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetbandits/env.hpp"
#include "hetbandits/random.hpp"
#include "hetbandits/trace.hpp"

namespace hetbandits {

enum class Scenario { kCluster, kPersonal, kOffline };
enum class Algorithm { kSclb, kCmlb, kPmlb, kLinucbInd, kRandom };

std::string_view to_string(Scenario s);
std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct ExperimentConfig {
  Scenario scenario = Scenario::kCluster;
  std::vector<Algorithm> algorithms{Algorithm::kCmlb};

  std::size_t n_agents = 40;
  std::int64_t horizon = 1000;
  std::size_t k_arms = 25;
  std::size_t dim = 15;

  std::size_t n_clusters = 4;
  double zipf_z = 0.0;
  bool orthogonal_centers = false;
  double sigma_spread = 0.1;

  double alpha = 0.2;
  double c_explore = 0.2;
  double delta = 0.4;
  std::optional<double> gamma;  // default 3 / (N T)^alpha
  double p_star = 0.0;
  double lambda = 1.0;

  double noise_sigma = 1.0;
  int reps = 30;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  std::filesystem::path output_dir = "out";

  std::filesystem::path items_path;
  std::filesystem::path interactions_path;

  // Defaults for a scenario: d=15, K=25, T=1000, 30 reps, delta=0.4,
  // alpha=0.2, C=0.2, p*=0 for synthetic runs; d=25, K=25, T=10000,
  // delta=0.3, alpha=C=0.5 for offline replay.
  static ExperimentConfig defaults_for(Scenario scenario);

  // Applies one `key = value` setting; keys are the CLI flag names without
  // the leading dashes. Throws ConfigError on unknown keys or bad values.
  void apply(std::string_view key, std::string_view value);

  // Throws ConfigError. Checks every numeric range before anything runs.
  void validate() const;
};

// All keys accepted by ExperimentConfig::apply, in CLI order.
const std::vector<std::string>& config_keys();

// Reads a flat `key = value` file ('#' comments allowed) into `config`.
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

// Runs one algorithm for one repetition.
RegretTrace run_algorithm(Algorithm algorithm, const ExperimentConfig& config,
                          const Environment& env, const RunSeeds& seeds);

// Builds the synthetic environment of a repetition. Every algorithm under the
// same master seed sees the same population, contexts and noise.
SyntheticEnvironment make_synthetic_environment(const ExperimentConfig& config,
                                                const RunSeeds& seeds);

// Linear-interpolation percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);

struct CurvePoint {
  std::int64_t round = 0;
  double mean = 0.0;
  double lo95 = 0.0;
  double hi95 = 0.0;
};

// Per round, the mean over repetitions of per-agent-averaged cumulative
// regret with its 2.5 / 97.5 percentile band.
std::vector<CurvePoint> summary_curve(const std::vector<RegretTrace>& traces);

struct SummaryRow {
  std::string algorithm;
  double final_mean = 0.0;
  double band_half_width = 0.0;
  double wall_clock_s = 0.0;
};

SummaryRow summarize(const std::string& algorithm, const std::vector<RegretTrace>& traces,
                     double wall_clock_s = 0.0);

inline constexpr std::string_view kSummaryHeader = "algo,round,mean_cum_regret,lo95,hi95";
void write_summary_csv(const std::filesystem::path& path,
                       const std::map<std::string, std::vector<CurvePoint>>& curves);

struct ExperimentResult {
  std::map<std::string, std::vector<RegretTrace>> traces;
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

// Runs every configured algorithm for every repetition (seeds derived from
// (master_seed, rep)), writes trace_<algo>_rep<k>.csv per run, summary.csv,
// runs.csv and, for offline replay, replay_<algo>_rep<k>.csv.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Loads trace_<algo>_rep<k>.csv files from a directory and summarizes them.
std::vector<SummaryRow> summarize_directory(const std::filesystem::path& dir);

std::string trace_file_name(Algorithm algorithm, int rep);

}  // namespace hetbandits
