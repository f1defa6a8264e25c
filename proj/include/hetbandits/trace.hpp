#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hetbandits {

enum class Phase {
  kExplore,      // individual learning before clustering
  kCollaborate,  // per-block learner after clustering
  kCommon,       // shared learner estimating the population mean
  kPersonal,     // per-agent learner on shifted rewards
  kIndependent,  // no-collaboration baseline
  kRandom,       // uniform random policy
};

std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

struct TraceEntry {
  std::size_t agent = 0;
  std::int64_t round = 0;
  Phase phase = Phase::kIndependent;
  std::size_t arm = 0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

// Per-agent, per-round regret of one repetition. Entries are appended round
// by round, all agents of a round before the next round.
class RegretTrace {
 public:
  RegretTrace() = default;
  RegretTrace(std::size_t n_agents, int rep = 0);

  std::size_t n_agents() const { return n_agents_; }
  int rep() const { return rep_; }
  void set_rep(int rep) { rep_ = rep; }
  std::size_t n_rounds() const { return n_agents_ == 0 ? 0 : entries_.size() / n_agents_; }
  const std::vector<TraceEntry>& entries() const { return entries_; }

  // cum_regret is the running per-agent sum.
  void record(std::size_t agent, std::int64_t round, Phase phase, std::size_t arm,
              double inst_regret);

  // Appends another segment's rows, re-accumulating cumulative regret.
  void append(const RegretTrace& segment);

  // Row of (agent, round_index), round_index counting from 0.
  const TraceEntry& at(std::size_t agent, std::size_t round_index) const {
    return entries_[round_index * n_agents_ + agent];
  }

  double final_cum_regret(std::size_t agent) const;
  // Cumulative regret averaged over agents after each round.
  std::vector<double> mean_cum_regret() const;

  // Builds a trace from stored rows without recomputing cum_regret.
  static RegretTrace from_entries(std::size_t n_agents, int rep,
                                  std::vector<TraceEntry> entries);

  friend bool operator==(const RegretTrace&, const RegretTrace&) = default;

 private:
  std::size_t n_agents_ = 0;
  int rep_ = 0;
  std::vector<TraceEntry> entries_;
  std::vector<double> running_;
};

inline constexpr std::string_view kTraceHeader =
    "rep,agent,round,phase,arm,inst_regret,cum_regret";

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

void write_trace_csv(std::ostream& out, const RegretTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const RegretTrace& trace);
// Throws ParseError on malformed input.
RegretTrace parse_trace_csv(std::istream& in, const std::string& name = "<stream>");
RegretTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace hetbandits
