// hetbandits: multi-agent linear bandit simulations and offline replay.
//
//   hetbandits simulate-cluster  [flags]
//   hetbandits simulate-personal [flags]
//   hetbandits replay-offline --items FILE --interactions FILE [flags]
//   hetbandits summarize DIR
//
// Exit codes: 0 ok, 2 configuration error, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hetbandits/errors.hpp"
#include "hetbandits/harness.hpp"
#include "hetbandits/trace.hpp"

namespace hb = hetbandits;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Flags {
  std::map<std::string, std::string> values;
  std::string config_path;
  bool orthogonal = false;
};

void add_experiment_flags(CLI::App& cmd, Flags& flags, hb::Scenario scenario) {
  auto flag = [&](const std::string& key, const std::string& help) {
    cmd.add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags.values[key] = v; }, help);
  };
  flag("agents", "number of agents N");
  flag("horizon", "rounds T");
  flag("arms", "arms per round K");
  flag("dim", "context dimension d");
  flag("noise-sigma", "reward noise standard deviation");
  flag("alpha", "separability exponent");
  flag("c-explore", "exploration constant C");
  flag("delta", "confidence level");
  flag("p-star", "minimum cluster fraction p*");
  flag("gamma", "clustering threshold (default 3/(NT)^alpha)");
  flag("lambda", "ridge weight");
  flag("reps", "repetitions");
  flag("seed", "master seed (fallback: HETBANDITS_SEED)");
  flag("jobs", "repetitions run concurrently");
  flag("algo", "comma-separated: sclb,cmlb,pmlb,linucb-ind,random");
  flag("out", "output directory");
  if (scenario == hb::Scenario::kCluster) {
    flag("clusters", "number of clusters L");
    flag("zipf-z", "Zipf exponent of cluster sizes");
    cmd.add_flag("--orthogonal-centers", flags.orthogonal, "orthonormal cluster centers");
  }
  if (scenario == hb::Scenario::kPersonal) flag("sigma-spread", "spread around the mean");
  if (scenario == hb::Scenario::kOffline) {
    flag("items", "items file: id,x1,...,xd");
    flag("interactions", "interactions file: user,item");
  }
  cmd.add_option("--config", flags.config_path, "key = value settings file");
}

hb::ExperimentConfig build_config(hb::Scenario scenario, const Flags& flags) {
  auto config = hb::ExperimentConfig::defaults_for(scenario);
  if (const char* env_seed = std::getenv("HETBANDITS_SEED")) config.apply("seed", env_seed);
  if (!flags.config_path.empty()) hb::apply_config_file(config, flags.config_path);
  for (const auto& [key, value] : flags.values) config.apply(key, value);
  if (flags.orthogonal) config.orthogonal_centers = true;
  return config;
}

void print_rows(const std::vector<hb::SummaryRow>& rows) {
  std::cout << "algo,final_mean_cum_regret,band_half_width,wall_clock_s\n";
  for (const auto& r : rows) {
    std::cout << r.algorithm << ',' << hb::format_double(r.final_mean) << ','
              << hb::format_double(r.band_half_width) << ','
              << hb::format_double(r.wall_clock_s) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent linear bandit simulations"};
  app.require_subcommand(1);

  Flags cluster_flags, personal_flags, offline_flags;
  auto* cluster = app.add_subcommand("simulate-cluster", "clustered population");
  add_experiment_flags(*cluster, cluster_flags, hb::Scenario::kCluster);
  auto* personal = app.add_subcommand("simulate-personal", "personalized population");
  add_experiment_flags(*personal, personal_flags, hb::Scenario::kPersonal);
  auto* offline = app.add_subcommand("replay-offline", "replay an implicit-feedback log");
  add_experiment_flags(*offline, offline_flags, hb::Scenario::kOffline);

  std::string summary_dir;
  auto* summarize = app.add_subcommand("summarize", "summarize trace files in a directory");
  summarize->add_option("dir", summary_dir, "directory with trace_*.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (summarize->parsed()) {
      print_rows(hb::summarize_directory(summary_dir));
      return 0;
    }
    hb::ExperimentConfig config;
    if (cluster->parsed()) config = build_config(hb::Scenario::kCluster, cluster_flags);
    if (personal->parsed()) config = build_config(hb::Scenario::kPersonal, personal_flags);
    if (offline->parsed()) config = build_config(hb::Scenario::kOffline, offline_flags);
    const auto result = hb::run_experiment(config);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    print_rows(result.rows);
  } catch (const hb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hb::InvalidSpec& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hb::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
