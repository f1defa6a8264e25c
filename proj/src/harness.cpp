#include "hetbandits/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "hetbandits/baselines.hpp"
#include "hetbandits/clustering.hpp"
#include "hetbandits/errors.hpp"
#include "hetbandits/offline.hpp"
#include "hetbandits/personalization.hpp"
#include "text.hpp"

namespace hetbandits {
namespace {

constexpr std::pair<Algorithm, std::string_view> kAlgorithmNames[] = {
    {Algorithm::kSclb, "sclb"},
    {Algorithm::kCmlb, "cmlb"},
    {Algorithm::kPmlb, "pmlb"},
    {Algorithm::kLinucbInd, "linucb-ind"},
    {Algorithm::kRandom, "random"},
};

template <typename T>
T parse_or_throw(std::string_view key, std::string_view value) {
  T out{};
  if (!detail::parse_number(value, out)) {
    throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  const auto v = detail::trim(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean '" + std::string(value) + "' for " + std::string(key));
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = [] {
    std::vector<std::pair<std::string, Setter>> t;
    auto num = [&t](std::string key, auto member) {
      t.emplace_back(key, [member](ExperimentConfig& c, std::string_view k, std::string_view v) {
        using T = std::remove_reference_t<decltype(c.*member)>;
        c.*member = parse_or_throw<T>(k, v);
      });
    };
    num("agents", &ExperimentConfig::n_agents);
    num("horizon", &ExperimentConfig::horizon);
    num("arms", &ExperimentConfig::k_arms);
    num("dim", &ExperimentConfig::dim);
    num("clusters", &ExperimentConfig::n_clusters);
    num("zipf-z", &ExperimentConfig::zipf_z);
    t.emplace_back("orthogonal-centers",
                   [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                     c.orthogonal_centers = parse_bool(k, v);
                   });
    num("sigma-spread", &ExperimentConfig::sigma_spread);
    num("alpha", &ExperimentConfig::alpha);
    num("c-explore", &ExperimentConfig::c_explore);
    num("delta", &ExperimentConfig::delta);
    num("p-star", &ExperimentConfig::p_star);
    t.emplace_back("gamma", [](ExperimentConfig& c, std::string_view k, std::string_view v) {
      c.gamma = parse_or_throw<double>(k, v);
    });
    num("lambda", &ExperimentConfig::lambda);
    num("noise-sigma", &ExperimentConfig::noise_sigma);
    num("reps", &ExperimentConfig::reps);
    num("seed", &ExperimentConfig::master_seed);
    num("jobs", &ExperimentConfig::jobs);
    t.emplace_back("algo", [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.algorithms.clear();
      for (auto name : detail::split(v, ',')) {
        auto algo = parse_algorithm(name);
        if (!algo) throw ConfigError("unknown algorithm '" + std::string(name) + "'");
        c.algorithms.push_back(*algo);
      }
    });
    t.emplace_back("out", [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.output_dir = std::string(detail::trim(v));
    });
    t.emplace_back("items", [](ExperimentConfig& c, std::string_view, std::string_view v) {
      c.items_path = std::string(detail::trim(v));
    });
    t.emplace_back("interactions",
                   [](ExperimentConfig& c, std::string_view, std::string_view v) {
                     c.interactions_path = std::string(detail::trim(v));
                   });
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::string rep_tag(int rep) {
  std::ostringstream s;
  s << "rep";
  s.width(3);
  s.fill('0');
  s << rep;
  return s.str();
}

struct RunOutput {
  RegretTrace trace;
  double wall_clock_s = 0.0;
  std::optional<ReplayResult> replay;
};

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kCluster: return "cluster";
    case Scenario::kPersonal: return "personal";
    case Scenario::kOffline: return "offline";
  }
  return "unknown";
}

std::string_view to_string(Algorithm a) {
  for (const auto& [algo, name] : kAlgorithmNames) {
    if (algo == a) return name;
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  for (const auto& [algo, name] : kAlgorithmNames) {
    if (name == detail::trim(text)) return algo;
  }
  return std::nullopt;
}

// -- configuration ------------------------------------------------------------

ExperimentConfig ExperimentConfig::defaults_for(Scenario scenario) {
  ExperimentConfig c;
  c.scenario = scenario;
  if (scenario == Scenario::kPersonal) c.algorithms = {Algorithm::kPmlb};
  if (scenario == Scenario::kOffline) {
    c.dim = 25;
    c.k_arms = 25;
    c.horizon = 10000;
    c.delta = 0.3;
    c.alpha = 0.5;
    c.c_explore = 0.5;
    c.reps = 1;
  }
  return c;
}

void ExperimentConfig::apply(std::string_view key, std::string_view value) {
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(*this, key, value);
      return;
    }
  }
  throw ConfigError("unknown setting '" + std::string(key) + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void ExperimentConfig::validate() const {
  require(!algorithms.empty(), "no algorithm selected");
  require(n_agents >= 1, "agents must be >= 1");
  require(horizon >= 1, "horizon must be >= 1");
  require(k_arms >= 1, "arms must be >= 1");
  require(dim >= 1, "dim must be >= 1");
  require(n_clusters >= 1 && n_clusters <= n_agents, "clusters must be in [1, agents]");
  require(!orthogonal_centers || n_clusters <= dim, "orthogonal centers need clusters <= dim");
  require(zipf_z >= 0.0, "zipf-z must be >= 0");
  require(sigma_spread >= 0.0, "sigma-spread must be >= 0");
  // The offline replay defaults use alpha = 1/2 exactly.
  const bool alpha_ok =
      alpha > 0.0 && (alpha < 0.5 || (scenario == Scenario::kOffline && alpha == 0.5));
  require(alpha_ok, "alpha must be in (0, 1/2)");
  require(c_explore > 0.0, "c-explore must be positive");
  require(delta > 0.0 && delta < 1.0, "delta must be in (0, 1)");
  require(!gamma || *gamma >= 0.0, "gamma must be >= 0");
  require(p_star >= 0.0 && p_star <= 1.0, "p-star must be in [0, 1]");
  require(lambda > 0.0, "lambda must be positive");
  require(noise_sigma >= 0.0, "noise-sigma must be >= 0");
  require(reps >= 1, "reps must be >= 1");
  require(jobs >= 1, "jobs must be >= 1");
  if (scenario == Scenario::kOffline) {
    require(!items_path.empty(), "offline replay needs --items");
    require(!interactions_path.empty(), "offline replay needs --interactions");
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    config.apply(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
}

// -- runs ---------------------------------------------------------------------

SyntheticEnvironment make_synthetic_environment(const ExperimentConfig& config,
                                                const RunSeeds& seeds) {
  PopulationSpec spec;
  spec.n_agents = config.n_agents;
  spec.dim = config.dim;
  if (config.scenario == Scenario::kPersonal) {
    spec.kind = PersonalizedSpec{config.sigma_spread};
  } else {
    spec.kind = ClusteredSpec{config.n_clusters, config.zipf_z, config.orthogonal_centers};
  }
  Population pop = build_population(spec, seeds.stream(Stream::kPopulation));
  return SyntheticEnvironment(std::move(pop), ContextMode::kCube, config.k_arms,
                              config.noise_sigma, seeds);
}

RegretTrace run_algorithm(Algorithm algorithm, const ExperimentConfig& config,
                          const Environment& env, const RunSeeds& seeds) {
  const bool allow_half = config.scenario == Scenario::kOffline;
  switch (algorithm) {
    case Algorithm::kCmlb: {
      CmlbConfig c;
      c.alpha = config.alpha;
      c.c_explore = config.c_explore;
      c.delta = config.delta;
      c.gamma = config.gamma.value_or(default_gamma(env.n_agents(), config.horizon, config.alpha));
      c.p_star = config.p_star;
      c.horizon = config.horizon;
      c.lambda = config.lambda;
      c.noise_sigma = config.noise_sigma;
      c.validate(allow_half);
      return cmlb_run(c, env).trace;
    }
    case Algorithm::kSclb: {
      SclbConfig c;
      c.alpha = config.alpha;
      c.c_explore = config.c_explore;
      c.delta = config.delta;
      c.horizon = config.horizon;
      c.lambda = config.lambda;
      c.noise_sigma = config.noise_sigma;
      c.validate(allow_half);
      return sclb_run(c, env).trace;
    }
    case Algorithm::kPmlb: {
      PmlbConfig c{config.horizon, config.delta, config.noise_sigma, config.lambda};
      return pmlb_run(c, env).trace;
    }
    case Algorithm::kLinucbInd: {
      BaselineConfig c{config.horizon, config.delta, config.lambda, config.noise_sigma};
      return independent_oful_run(c, env);
    }
    case Algorithm::kRandom: {
      BaselineConfig c{config.horizon, config.delta, config.lambda, config.noise_sigma};
      return uniform_random_run(c, env, seeds.stream(Stream::kPolicy));
    }
  }
  throw ConfigError("unknown algorithm");
}

// -- summaries ----------------------------------------------------------------

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<CurvePoint> summary_curve(const std::vector<RegretTrace>& traces) {
  if (traces.empty()) return {};
  std::vector<std::vector<double>> per_rep;
  std::size_t rounds = std::numeric_limits<std::size_t>::max();
  for (const RegretTrace& t : traces) {
    per_rep.push_back(t.mean_cum_regret());
    rounds = std::min(rounds, per_rep.back().size());
  }
  std::vector<CurvePoint> curve(rounds);
  std::vector<double> column(traces.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < per_rep.size(); ++k) {
      column[k] = per_rep[k][r];
      sum += column[k];
    }
    curve[r].round = traces.front().at(0, r).round;
    curve[r].mean = sum / static_cast<double>(column.size());
    curve[r].lo95 = percentile(column, 0.025);
    curve[r].hi95 = percentile(column, 0.975);
  }
  return curve;
}

SummaryRow summarize(const std::string& algorithm, const std::vector<RegretTrace>& traces,
                     double wall_clock_s) {
  SummaryRow row;
  row.algorithm = algorithm;
  row.wall_clock_s = wall_clock_s;
  const auto curve = summary_curve(traces);
  if (!curve.empty()) {
    row.final_mean = curve.back().mean;
    row.band_half_width = 0.5 * (curve.back().hi95 - curve.back().lo95);
  }
  return row;
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::map<std::string, std::vector<CurvePoint>>& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kSummaryHeader << '\n';
  for (const auto& [algo, curve] : curves) {
    for (const CurvePoint& p : curve) {
      out << algo << ',' << p.round << ',' << format_double(p.mean) << ','
          << format_double(p.lo95) << ',' << format_double(p.hi95) << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

std::string trace_file_name(Algorithm algorithm, int rep) {
  return "trace_" + std::string(to_string(algorithm)) + "_" + rep_tag(rep) + ".csv";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());

  std::optional<OfflineDataset> dataset;
  if (config.scenario == Scenario::kOffline) {
    dataset = load_offline(config.items_path, config.interactions_path);
    require(dataset->dim() >= 1, "offline dataset has no items");
  } else {
    const double rho_min = 1.0 / (3.0 * static_cast<double>(config.dim));
    const double warm = tau_min(config.delta, config.dim, config.horizon, rho_min);
    if (static_cast<double>(config.horizon) < warm) {
      result.warnings.push_back("horizon " + std::to_string(config.horizon) +
                                " is below the context warm-up length tau_min = " +
                                format_double(std::ceil(warm)));
    }
  }

  const std::size_t n_algos = config.algorithms.size();
  std::vector<std::vector<RunOutput>> outputs(static_cast<std::size_t>(config.reps),
                                              std::vector<RunOutput>(n_algos));
  std::atomic<int> next_rep{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (int rep = next_rep++; rep < config.reps; rep = next_rep++) {
      try {
        const RunSeeds seeds = RunSeeds::for_rep(config.master_seed, rep);
        std::unique_ptr<Environment> env;
        if (dataset) {
          env = std::make_unique<OfflineEnvironment>(*dataset, config.k_arms,
                                                     seeds.stream(Stream::kContexts));
        } else {
          env = std::make_unique<SyntheticEnvironment>(
              make_synthetic_environment(config, seeds));
        }
        for (std::size_t a = 0; a < n_algos; ++a) {
          const auto start = std::chrono::steady_clock::now();
          RunOutput& out = outputs[rep][a];
          const Algorithm algo = config.algorithms[a];
          if (dataset) {
            const auto& offline = static_cast<const OfflineEnvironment&>(*env);
            out.replay = offline_replay(
                offline,
                [&](const Environment& e) { return run_algorithm(algo, config, e, seeds); },
                config.horizon, seeds.stream(Stream::kBaselinePolicy));
            out.trace = out.replay->algorithm;
          } else {
            out.trace = run_algorithm(algo, config, *env, seeds);
          }
          out.trace.set_rep(rep);
          out.wall_clock_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next_rep = config.reps;
      }
    }
  };

  const int n_threads = std::min(config.jobs, config.reps);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Single collector writes everything in (algorithm, rep) order.
  std::map<std::string, std::vector<CurvePoint>> curves;
  std::ofstream runs(config.output_dir / "runs.csv", std::ios::binary);
  if (!runs) throw IoError("cannot write runs.csv in " + config.output_dir.string());
  runs << "algo,rep,rep_seed,wall_clock_s\n";
  for (std::size_t a = 0; a < n_algos; ++a) {
    const Algorithm algo = config.algorithms[a];
    const std::string name(to_string(algo));
    std::vector<RegretTrace> traces;
    double wall = 0.0;
    for (int rep = 0; rep < config.reps; ++rep) {
      RunOutput& out = outputs[rep][a];
      write_trace_csv(config.output_dir / trace_file_name(algo, rep), out.trace);
      if (out.replay) {
        write_replay_csv(config.output_dir / ("replay_" + name + "_" + rep_tag(rep) + ".csv"),
                         *out.replay);
      }
      runs << name << ',' << rep << ','
           << RunSeeds::for_rep(config.master_seed, rep).rep_seed << ','
           << format_double(out.wall_clock_s) << '\n';
      wall += out.wall_clock_s;
      traces.push_back(std::move(out.trace));
    }
    curves[name] = summary_curve(traces);
    result.rows.push_back(summarize(name, traces, wall / config.reps));
    result.traces[name] = std::move(traces);
  }
  write_summary_csv(config.output_dir / "summary.csv", curves);
  return result;
}

std::vector<SummaryRow> summarize_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::map<std::string, std::map<int, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with("trace_") || !name.ends_with(".csv")) continue;
    const auto rep_pos = name.rfind("_rep");
    if (rep_pos == std::string::npos || rep_pos <= 6) continue;
    int rep = 0;
    if (!detail::parse_number(
            std::string_view(name).substr(rep_pos + 4, name.size() - rep_pos - 8), rep)) {
      continue;
    }
    files[name.substr(6, rep_pos - 6)][rep] = entry.path();
  }

  std::map<std::string, double> wall;
  std::map<std::string, int> wall_count;
  std::ifstream runs(dir / "runs.csv");
  std::string line;
  if (runs && std::getline(runs, line)) {
    while (std::getline(runs, line)) {
      const auto f = detail::split(line, ',');
      double w = 0.0;
      if (f.size() == 4 && detail::parse_number(f[3], w)) {
        wall[std::string(f[0])] += w;
        ++wall_count[std::string(f[0])];
      }
    }
  }

  std::vector<SummaryRow> rows;
  for (const auto& [algo, by_rep] : files) {
    std::vector<RegretTrace> traces;
    for (const auto& [rep, path] : by_rep) traces.push_back(read_trace_csv(path));
    const double w = wall_count[algo] > 0 ? wall[algo] / wall_count[algo] : 0.0;
    rows.push_back(summarize(algo, traces, w));
  }
  return rows;
}

}  // namespace hetbandits
