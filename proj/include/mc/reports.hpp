#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/profiler.hpp"
#include "mc/strutil.hpp"
#include "mc/synth.hpp"

namespace mc {

// Selection CSV: one row per loop, sorted; one median column per backend seen
// in the timing table. Fallback loops leave their timing cells empty.
inline std::string format_selection_report(const SelectionPlan& plan,
                                           const TimingTable& table) {
  std::string out = "loop_id,chosen_backend,reason";
  auto backends = table.backends();
  for (const auto& b : backends) out += ",median_ns_" + b;
  out += "\n";
  for (const auto& [loop, choice] : plan.choices) {
    out += loop + "," + choice.backend + "," + choice.reason;
    for (const auto& b : backends) {
      out += ",";
      const auto* samples = table.find(loop, b);
      if (samples && !samples->empty()) out += std::to_string(median_ns(*samples));
    }
    out += "\n";
  }
  return out;
}

inline void emit_selection_report(const SelectionPlan& plan, const TimingTable& table,
                                  const fs::path& path) {
  write_file(path, format_selection_report(plan, table));
}

// Raw per-run totals behind the medians, for auditing a selection.
inline std::string format_timing_dump(const TimingTable& table) {
  std::string out = "loop_id,backend,run_index,total_ns\n";
  for (const auto& [key, samples] : table.entries)
    for (size_t r = 0; r < samples.size(); ++r)
      out += key.first + "," + key.second + "," + std::to_string(r) + "," +
             std::to_string(samples[r]) + "\n";
  return out;
}

inline void emit_timing_dump(const TimingTable& table, const fs::path& path) {
  write_file(path, format_timing_dump(table));
}

// Procedure: geomean_speedup. exp(mean(ln(baseline/composed))) over apps.
inline double geomean_speedup(const std::map<std::string, double>& baseline_ns,
                              const std::map<std::string, double>& composed_ns) {
  if (baseline_ns.empty() || baseline_ns.size() != composed_ns.size())
    throw MismatchedKeys("baseline and composed timings cover different apps");
  double sum = 0;
  for (const auto& [app, base] : baseline_ns) {
    auto it = composed_ns.find(app);
    if (it == composed_ns.end())
      throw MismatchedKeys("no composed timing for app '" + app + "'");
    if (!(base > 0) || !(it->second > 0))
      throw NonpositiveTime("timings must be positive for app '" + app + "'");
    sum += std::log(base / it->second);
  }
  return std::exp(sum / baseline_ns.size());
}

}  // namespace mc
