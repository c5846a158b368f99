#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/process.hpp"
#include "mc/strutil.hpp"

namespace mc {

// Per-loop, per-backend, per-run nanosecond totals. A missing entry means the
// loop never executed under that backend.
struct TimingTable {
  std::map<std::pair<std::string, std::string>, std::vector<uint64_t>> entries;
  int runs = 0;

  void add(const std::string& loop_id, const std::string& backend, uint64_t total) {
    entries[{loop_id, backend}].push_back(total);
  }
  const std::vector<uint64_t>* find(const std::string& loop_id,
                                    const std::string& backend) const {
    auto it = entries.find({loop_id, backend});
    return it == entries.end() ? nullptr : &it->second;
  }
  std::set<std::string> loops() const {
    std::set<std::string> out;
    for (const auto& [key, _] : entries) out.insert(key.first);
    return out;
  }
  std::set<std::string> backends() const {
    std::set<std::string> out;
    for (const auto& [key, _] : entries) out.insert(key.second);
    return out;
  }
};

// Procedure: parse_profile_records. One run's report file -> per-loop total.
// A loop recorded k times in a run contributes the sum of its k records.
inline std::map<std::string, uint64_t> parse_profile_records(const std::string& text) {
  std::map<std::string, uint64_t> totals;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    uint64_t ns = 0;
    if (cols.size() != 3 || cols[0] != "MC" || cols[1].empty() ||
        !parse_u64(std::string(trim(cols[2])), ns)) {
      Diag::global().warn("malformed timing record skipped: " + line);
      continue;
    }
    totals[cols[1]] += ns;
  }
  return totals;
}

// Procedure: run_profiled. Strictly sequential: the executable runs `runs`
// times, each against a fresh report file, and no other profiled process may
// run concurrently (callers serialize).
inline std::map<std::string, std::vector<uint64_t>> run_profiled(
    const std::string& executable, const std::vector<std::string>& input_args,
    int runs, ProcessRunner& runner, const fs::path& profile_dir,
    const std::string& tag) {
  if (runs < 1) throw UsageError("runs must be >= 1");
  ensure_dir(profile_dir);
  std::map<std::string, std::vector<uint64_t>> fragment;
  for (int r = 0; r < runs; ++r) {
    fs::path report = profile_dir / (tag + ".r" + std::to_string(r) + ".prof");
    remove_if_exists(report);
    std::vector<std::string> argv{executable};
    argv.insert(argv.end(), input_args.begin(), input_args.end());
    RunResult res = runner.run(argv, {{"MC_PROFILE_OUT", report.string()}});
    if (res.spawn_failed)
      throw RunFailed("cannot execute '" + executable + "': " + res.output);
    if (res.exit_code != 0)
      throw RunFailed("'" + executable + "' exited " + std::to_string(res.exit_code) +
                      " during profiling run " + std::to_string(r));
    if (fs::exists(report))
      for (const auto& [loop, total] : parse_profile_records(read_file(report)))
        fragment[loop].push_back(total);
  }
  return fragment;
}

// Even-count median takes the lower-middle element so the result is always an
// observed sample.
inline uint64_t median_ns(std::vector<uint64_t> samples) {
  if (samples.empty()) throw EmptySamples("median of empty sample list");
  std::sort(samples.begin(), samples.end());
  return samples[(samples.size() - 1) / 2];
}

// ---- hardware counters --------------------------------------------------------

struct CounterSet {
  std::string loop_id;
  std::map<std::string, double> counters;
  double instructions = 0;
};

inline const char* kCounterCsvHeader = "loop_id,event,count";

// Counter interchange CSV: header `loop_id,event,count`; `inst_retired` is
// reserved for the instruction count.
inline std::vector<CounterSet> parse_counter_csv(const std::string& text) {
  auto lines = split_lines(text);
  size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i >= lines.size() || trim(lines[i]) != kCounterCsvHeader)
    throw IoError("counter csv: missing 'loop_id,event,count' header");
  std::vector<CounterSet> out;
  std::map<std::string, size_t> index;
  for (++i; i < lines.size(); ++i) {
    std::string line(trim(lines[i]));
    if (line.empty()) continue;
    auto cols = split(line, ',');
    double value = 0;
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() ||
        !parse_double(std::string(trim(cols[2])), value)) {
      Diag::global().warn("malformed counter row skipped: " + line);
      continue;
    }
    auto it = index.find(cols[0]);
    if (it == index.end()) {
      index[cols[0]] = out.size();
      out.push_back(CounterSet{cols[0], {}, 0});
      it = index.find(cols[0]);
    }
    CounterSet& cs = out[it->second];
    if (cols[1] == "inst_retired")
      cs.instructions = value;
    else
      cs.counters[cols[1]] = value;
  }
  return out;
}

// Procedure: collect_counters. Wraps one run of the baseline executable in the
// configured provider command; the provider writes the interchange CSV.
inline std::vector<CounterSet> collect_counters(
    const std::string& provider_template, const std::string& executable,
    const std::vector<std::string>& input_args, const fs::path& out_csv,
    ProcessRunner& runner) {
  static const char* kGuidance =
      "; prediction needs a counter provider (set @provider in the backend "
      "config) or use profiling-based search instead";
  if (provider_template.empty())
    throw ProviderUnavailable(std::string("no counter provider configured") + kGuidance);
  remove_if_exists(out_csv);
  auto argv = render_template(provider_template,
                              {{"exe", executable}, {"out_csv", out_csv.string()}},
                              {{"args", input_args}});
  RunResult res = runner.run(argv);
  if (res.spawn_failed)
    throw ProviderUnavailable("counter provider cannot be executed: " + res.output +
                              kGuidance);
  if (res.exit_code != 0)
    throw ProviderUnavailable("counter provider exited " +
                              std::to_string(res.exit_code) + ": " + res.output +
                              kGuidance);
  if (!fs::exists(out_csv))
    throw ProviderUnavailable("counter provider produced no CSV at " +
                              out_csv.string() + kGuidance);
  return parse_counter_csv(read_file(out_csv));
}

}  // namespace mc
