#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hetbandits/errors.hpp"
#include "hetbandits/harness.hpp"

using namespace hetbandits;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ExperimentConfig small_cluster(const fs::path& out) {
  auto c = ExperimentConfig::defaults_for(Scenario::kCluster);
  c.n_agents = 6;
  c.n_clusters = 2;
  c.horizon = 60;
  c.dim = 4;
  c.k_arms = 5;
  c.reps = 3;
  c.master_seed = 17;
  c.output_dir = out;
  return c;
}

RegretTrace constant_trace(double per_round, std::size_t rounds) {
  RegretTrace t(1);
  for (std::size_t r = 1; r <= rounds; ++r) {
    t.record(0, static_cast<std::int64_t>(r), Phase::kRandom, 0, per_round);
  }
  return t;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HETBANDITS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = ExperimentConfig::defaults_for(Scenario::kCluster);
  CHECK(c.dim == 15);
  CHECK(c.k_arms == 25);
  CHECK(c.horizon == 1000);
  CHECK(c.reps == 30);
  CHECK(c.delta == 0.4);
  CHECK(c.alpha == 0.2);
  CHECK(c.c_explore == 0.2);
  CHECK(c.p_star == 0.0);
  const auto o = ExperimentConfig::defaults_for(Scenario::kOffline);
  CHECK(o.dim == 25);
  CHECK(o.horizon == 10000);
  CHECK(o.delta == 0.3);
  CHECK(o.alpha == 0.5);
  CHECK(o.c_explore == 0.5);
}

TEST_CASE("apply and validate") {
  auto c = ExperimentConfig::defaults_for(Scenario::kCluster);
  c.apply("agents", "12");
  c.apply("gamma", "0.25");
  c.apply("algo", "sclb,linucb-ind");
  c.apply("orthogonal-centers", "true");
  CHECK(c.n_agents == 12);
  CHECK(c.gamma == 0.25);
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::kSclb, Algorithm::kLinucbInd});
  CHECK(c.orthogonal_centers);
  CHECK_NOTHROW(c.validate());

  CHECK_THROWS_AS(c.apply("agents", "-3"), ConfigError);
  CHECK_THROWS_AS(c.apply("nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(c.apply("algo", "club"), ConfigError);

  auto bad = c;
  bad.alpha = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.n_clusters = 13;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  auto off = ExperimentConfig::defaults_for(Scenario::kOffline);
  CHECK_THROWS_AS(off.validate(), ConfigError);  // no input files
  off.items_path = "i";
  off.interactions_path = "j";
  CHECK_NOTHROW(off.validate());
}

TEST_CASE("config file") {
  TempDir dir("hetbandits_cfg_test");
  std::ofstream(dir.path / "run.cfg") << "# comment\nagents = 9\n\nhorizon=77\nalgo = random\n";
  auto c = ExperimentConfig::defaults_for(Scenario::kCluster);
  apply_config_file(c, dir.path / "run.cfg");
  CHECK(c.n_agents == 9);
  CHECK(c.horizon == 77);
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::kRandom});
  std::ofstream(dir.path / "bad.cfg") << "agents 9\n";
  CHECK_THROWS_AS(apply_config_file(c, dir.path / "bad.cfg"), ConfigError);
  CHECK_THROWS_AS(apply_config_file(c, dir.path / "missing.cfg"), IoError);
}

TEST_CASE("percentile and summaries") {
  CHECK(percentile({1, 2, 3, 4, 5}, 0.5) == 3.0);
  CHECK(percentile({1, 2}, 0.25) == 1.25);
  CHECK(percentile({7}, 0.975) == 7.0);

  const auto zero = summarize("z", {constant_trace(0.0, 10)});
  CHECK(zero.final_mean == 0.0);
  CHECK(zero.band_half_width == 0.0);

  const auto two = summarize("ab", {constant_trace(1.0, 10), constant_trace(3.0, 10)});
  CHECK(two.final_mean == doctest::Approx(20.0));

  std::vector<RegretTrace> traces;
  std::vector<double> finals;
  for (int k = 0; k < 30; ++k) {
    const double v = 0.1 * ((k * 17) % 30);
    traces.push_back(constant_trace(v, 4));
    finals.push_back(4 * v);
  }
  // Direct 2.5 / 97.5 percentiles of the 30 finals.
  std::sort(finals.begin(), finals.end());
  const auto interp = [&](double q) {
    const double pos = q * 29.0;
    const auto lo = static_cast<std::size_t>(pos);
    return finals[lo] + (pos - lo) * (finals[lo + 1] - finals[lo]);
  };
  const auto curve = summary_curve(traces);
  CHECK(curve.back().lo95 == doctest::Approx(interp(0.025)));
  CHECK(curve.back().hi95 == doctest::Approx(interp(0.975)));
  CHECK(curve.back().round == 4);
}

TEST_CASE("run_experiment: random policy with one arm is all zeros") {
  TempDir dir("hetbandits_exp_zero");
  auto c = small_cluster(dir.path);
  c.reps = 1;
  c.k_arms = 1;
  c.algorithms = {Algorithm::kRandom};
  const auto r = run_experiment(c);
  CHECK(r.rows.at(0).final_mean == 0.0);
  std::ifstream in(dir.path / "summary.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "algo,round,mean_cum_regret,lo95,hi95");
  while (std::getline(in, line)) CHECK(line.ends_with(",0,0,0"));
}

TEST_CASE("run_experiment: files, determinism and pairing") {
  TempDir dir("hetbandits_exp_det");
  auto c = small_cluster(dir.path / "a");
  c.algorithms = {Algorithm::kCmlb, Algorithm::kSclb, Algorithm::kLinucbInd,
                  Algorithm::kRandom, Algorithm::kPmlb};
  const auto first = run_experiment(c);
  c.output_dir = dir.path / "b";
  c.jobs = 3;
  run_experiment(c);
  for (const auto& e : fs::directory_iterator(dir.path / "a")) {
    const auto name = e.path().filename().string();
    if (name == "runs.csv") continue;  // wall clock differs
    CHECK_MESSAGE(slurp(e.path()) == slurp(dir.path / "b" / name), name);
  }
  CHECK(fs::exists(dir.path / "a" / "trace_linucb-ind_rep002.csv"));
  CHECK(first.traces.at("cmlb").size() == 3);

  // Every algorithm saw the same contexts: LinUCB-Ind and random run on one
  // environment per rep, and regret depends only on (theta, batch, arm).
  const auto seeds = RunSeeds::for_rep(c.master_seed, 1);
  const auto env = make_synthetic_environment(c, seeds);
  const auto& rand_trace = first.traces.at("random")[1];
  const auto& ind_trace = first.traces.at("linucb-ind")[1];
  for (std::size_t t = 0; t < 60; ++t) {
    const auto batch = env.contexts(static_cast<std::int64_t>(t) + 1);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto& theta = env.population().thetas[i];
      CHECK(rand_trace.at(i, t).inst_regret ==
            instantaneous_regret(theta, batch, rand_trace.at(i, t).arm));
      CHECK(ind_trace.at(i, t).inst_regret ==
            instantaneous_regret(theta, batch, ind_trace.at(i, t).arm));
    }
  }

  const auto rows = summarize_directory(dir.path / "a");
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    const auto it = std::find_if(first.rows.begin(), first.rows.end(),
                                 [&](const SummaryRow& r) { return r.algorithm == row.algorithm; });
    REQUIRE(it != first.rows.end());
    CHECK(row.final_mean == it->final_mean);
  }
}

TEST_CASE("run_experiment: adding reps leaves earlier reps unchanged") {
  TempDir dir("hetbandits_exp_reps");
  auto c = small_cluster(dir.path / "a");
  c.algorithms = {Algorithm::kLinucbInd};
  c.reps = 2;
  run_experiment(c);
  c.reps = 4;
  c.output_dir = dir.path / "b";
  run_experiment(c);
  for (int rep = 0; rep < 2; ++rep) {
    const auto name = trace_file_name(Algorithm::kLinucbInd, rep);
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
  }
}

TEST_CASE("run_experiment: offline replay") {
  TempDir dir("hetbandits_exp_offline");
  {
    std::ofstream items(dir.path / "items.csv");
    for (int i = 0; i < 40; ++i) {
      items << "it" << i;
      for (int j = 0; j < 5; ++j) items << ',' << 0.05 * ((i + 3 * j) % 9 - 4);
      items << '\n';
    }
    std::ofstream inter(dir.path / "inter.csv");
    for (int u = 0; u < 6; ++u) {
      for (int k = 0; k < 5; ++k) inter << "u" << u << ",it" << (u * 5 + k * 3) % 40 << '\n';
    }
  }
  auto c = ExperimentConfig::defaults_for(Scenario::kOffline);
  c.items_path = dir.path / "items.csv";
  c.interactions_path = dir.path / "inter.csv";
  c.output_dir = dir.path / "out";
  c.horizon = 50;
  c.k_arms = 8;
  c.algorithms = {Algorithm::kCmlb, Algorithm::kRandom};
  run_experiment(c);
  CHECK(fs::exists(dir.path / "out" / "replay_cmlb_rep000.csv"));
  CHECK(fs::exists(dir.path / "out" / "trace_random_rep000.csv"));

  c.interactions_path = dir.path / "missing.csv";
  CHECK_THROWS_AS(run_experiment(c), IoError);
}

TEST_CASE("cli exit codes") {
  TempDir dir("hetbandits_cli_test");
  const std::string out = " --out " + (dir.path / "o").string();
  CHECK(run_cli("simulate-cluster --agents 4 --clusters 2 --horizon 20 --dim 3 --arms 4 "
                "--reps 1 --algo cmlb,random" + out) == 0);
  CHECK(fs::exists(dir.path / "o" / "summary.csv"));
  CHECK(run_cli("summarize " + (dir.path / "o").string()) == 0);
  CHECK(run_cli("simulate-cluster --alpha 0.7" + out) == 2);
  CHECK(run_cli("simulate-cluster --agents nope" + out) == 2);
  CHECK(run_cli("simulate-personal --bogus-flag 1" + out) == 2);
  CHECK(run_cli("replay-offline --items /nonexistent/a --interactions /nonexistent/b" + out) ==
        3);
  CHECK(run_cli("summarize /nonexistent/dir") == 3);
  CHECK(run_cli("simulate-cluster --config /nonexistent/cfg" + out) == 3);

  // HETBANDITS_SEED is the master seed when --seed is absent.
  const std::string base = "simulate-cluster --agents 3 --clusters 1 --horizon 10 --dim 2 "
                           "--arms 3 --reps 1 --algo random --out ";
  const auto p1 = dir.path / "s1", p2 = dir.path / "s2", p3 = dir.path / "s3";
  CHECK(run_cli(base + p1.string() + " --seed 5") == 0);
  CHECK(std::system(("HETBANDITS_SEED=5 " + std::string(HETBANDITS_CLI) + " " + base +
                     p2.string() + " >/dev/null 2>&1").c_str()) == 0);
  CHECK(run_cli(base + p3.string() + " --seed 6") == 0);
  const auto trace = trace_file_name(Algorithm::kRandom, 0);
  CHECK(slurp(p1 / trace) == slurp(p2 / trace));
  CHECK(slurp(p1 / trace) != slurp(p3 / trace));
}
