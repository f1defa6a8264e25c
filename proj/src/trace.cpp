#include "hetbandits/trace.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "hetbandits/errors.hpp"
#include "text.hpp"

namespace hetbandits {
namespace {

constexpr std::array<std::pair<Phase, std::string_view>, 6> kPhaseNames{{
    {Phase::kExplore, "explore"},
    {Phase::kCollaborate, "collaborate"},
    {Phase::kCommon, "common"},
    {Phase::kPersonal, "personal"},
    {Phase::kIndependent, "independent"},
    {Phase::kRandom, "random"},
}};

}  // namespace

std::string_view to_string(Phase phase) {
  for (const auto& [p, name] : kPhaseNames) {
    if (p == phase) return name;
  }
  return "unknown";
}

std::optional<Phase> parse_phase(std::string_view text) {
  for (const auto& [p, name] : kPhaseNames) {
    if (name == text) return p;
  }
  return std::nullopt;
}

RegretTrace::RegretTrace(std::size_t n_agents, int rep)
    : n_agents_(n_agents), rep_(rep), running_(n_agents, 0.0) {}

void RegretTrace::record(std::size_t agent, std::int64_t round, Phase phase,
                         std::size_t arm, double inst_regret) {
  running_.at(agent) += inst_regret;
  entries_.push_back(TraceEntry{agent, round, phase, arm, inst_regret, running_[agent]});
}

void RegretTrace::append(const RegretTrace& segment) {
  if (segment.n_agents_ != n_agents_) {
    throw std::invalid_argument("cannot append a trace with a different agent count");
  }
  for (const TraceEntry& e : segment.entries_) {
    record(e.agent, e.round, e.phase, e.arm, e.inst_regret);
  }
}

double RegretTrace::final_cum_regret(std::size_t agent) const {
  if (entries_.empty()) return 0.0;
  return at(agent, n_rounds() - 1).cum_regret;
}

std::vector<double> RegretTrace::mean_cum_regret() const {
  std::vector<double> out(n_rounds(), 0.0);
  for (std::size_t r = 0; r < out.size(); ++r) {
    double s = 0.0;
    for (std::size_t a = 0; a < n_agents_; ++a) s += at(a, r).cum_regret;
    out[r] = s / static_cast<double>(n_agents_);
  }
  return out;
}

RegretTrace RegretTrace::from_entries(std::size_t n_agents, int rep,
                                      std::vector<TraceEntry> entries) {
  RegretTrace trace(n_agents, rep);
  for (const TraceEntry& e : entries) {
    if (e.agent >= n_agents) throw std::invalid_argument("agent index out of range");
    trace.running_[e.agent] = e.cum_regret;
  }
  trace.entries_ = std::move(entries);
  return trace;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

void write_trace_csv(std::ostream& out, const RegretTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceEntry& e : trace.entries()) {
    out << trace.rep() << ',' << e.agent << ',' << e.round << ',' << to_string(e.phase)
        << ',' << e.arm << ',' << format_double(e.inst_regret) << ','
        << format_double(e.cum_regret) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const RegretTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace_csv(out, trace);
  if (!out) throw IoError("write failed for " + path.string());
}

RegretTrace parse_trace_csv(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || detail::trim(line) != kTraceHeader) {
    throw ParseError(name, line_no, "expected header '" + std::string(kTraceHeader) + "'");
  }
  std::vector<TraceEntry> entries;
  std::size_t n_agents = 0;
  int rep = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(detail::trim(line), ',');
    if (fields.size() != 7) throw ParseError(name, line_no, "expected 7 fields");
    TraceEntry e;
    int row_rep = 0;
    auto phase = parse_phase(fields[3]);
    if (!detail::parse_number(fields[0], row_rep) ||
        !detail::parse_number(fields[1], e.agent) ||
        !detail::parse_number(fields[2], e.round) || !phase ||
        !detail::parse_number(fields[4], e.arm) ||
        !detail::parse_number(fields[5], e.inst_regret) ||
        !detail::parse_number(fields[6], e.cum_regret)) {
      throw ParseError(name, line_no, "malformed trace row");
    }
    e.phase = *phase;
    if (first) {
      rep = row_rep;
      first = false;
    } else if (row_rep != rep) {
      throw ParseError(name, line_no, "trace file mixes repetitions");
    }
    n_agents = std::max(n_agents, e.agent + 1);
    entries.push_back(e);
  }
  if (n_agents > 0 && entries.size() % n_agents != 0) {
    throw ParseError(name, line_no, "row count is not a multiple of the agent count");
  }
  return RegretTrace::from_entries(n_agents, rep, std::move(entries));
}

RegretTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_trace_csv(in, path.string());
}

}  // namespace hetbandits
