#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/process.hpp"
#include "mc/strutil.hpp"

namespace mc {

struct EnergyRecord {
  std::string loop_id, backend;
  double pkg_energy_J = 0, dram_energy_J = 0, elapsed_s = 0, avg_power_W = 0;
};

namespace detail {

// Accepts both the table-cell form `| Energy [J] | 1.25 |` and the colon form
// `Energy [J]: 1.25`; returns the first numeric token after the key.
inline bool metric_value(const std::string& line, const std::string& key,
                         double& out) {
  size_t at = line.find(key);
  if (at == std::string::npos) return false;
  std::string rest = line.substr(at + key.size());
  std::string cleaned;
  for (char c : rest)
    cleaned += (c == '|' || c == ':') ? ' ' : c;
  for (const auto& word : split_ws(cleaned))
    if (parse_double(word, out)) return true;
  return false;
}

}  // namespace detail

struct EnergyRegion {
  std::string name;
  double pkg_energy_J = 0, dram_energy_J = 0, elapsed_s = 0;
  bool have_pkg = false, have_dram = false, have_elapsed = false;
};

// Procedure: parse_energy_regions. Region blocks are keyed by marker name;
// within a block the first occurrence of each metric wins. "Energy DRAM [J]"
// must be tested before "Energy [J]" because the latter is its substring.
inline std::vector<EnergyRegion> parse_energy_regions(const std::string& text) {
  std::vector<EnergyRegion> regions;
  EnergyRegion* cur = nullptr;
  for (const auto& raw : split_lines(text)) {
    std::string line(trim(raw));
    if (starts_with(line, "Region ")) {
      std::string name = line.substr(7);
      size_t comma = name.find(',');
      if (comma != std::string::npos) name = name.substr(0, comma);
      regions.push_back(EnergyRegion{std::string(trim(name)), 0, 0, 0});
      cur = &regions.back();
      continue;
    }
    if (!cur) continue;
    double v = 0;
    if (!cur->have_dram && detail::metric_value(line, "Energy DRAM [J]", v)) {
      cur->dram_energy_J = v;
      cur->have_dram = true;
    } else if (!cur->have_pkg && detail::metric_value(line, "Energy [J]", v)) {
      cur->pkg_energy_J = v;
      cur->have_pkg = true;
    } else if (!cur->have_elapsed &&
               (detail::metric_value(line, "Runtime (RDTSC) [s]", v) ||
                detail::metric_value(line, "RDTSC Runtime [s]", v))) {
      cur->elapsed_s = v;
      cur->have_elapsed = true;
    }
  }
  return regions;
}

// Procedure: run_energy_profile. One tool invocation per backend executable,
// sequential and exclusive. A missing tool aborts the mode; a backend whose
// output cannot be parsed is omitted with a warning.
inline std::vector<EnergyRecord> run_energy_profile(
    const std::map<std::string, std::string>& executables,
    const std::string& tool_template, const std::vector<std::string>& input_args,
    ProcessRunner& runner, const fs::path& out_dir) {
  if (tool_template.empty())
    throw ToolUnavailable(
        "no energy tool configured; set @energy_tool in the backend config "
        "(placeholders {exe}, {args}, {out})");
  ensure_dir(out_dir);
  std::vector<EnergyRecord> records;
  for (const auto& [backend, exe] : executables) {
    fs::path outfile = out_dir / ("energy." + backend + ".txt");
    remove_if_exists(outfile);
    auto argv = render_template(tool_template,
                                {{"exe", exe}, {"out", outfile.string()}},
                                {{"args", input_args}});
    RunResult res = runner.run(argv);
    if (res.spawn_failed)
      throw ToolUnavailable("energy tool cannot be executed: " + res.output);
    if (res.exit_code != 0) {
      Diag::global().warn("energy tool exited " + std::to_string(res.exit_code) +
                          " for backend '" + backend + "'; rows omitted");
      continue;
    }
    if (!fs::exists(outfile)) {
      Diag::global().warn("energy tool wrote no output for backend '" + backend +
                          "'; rows omitted");
      continue;
    }
    auto regions = parse_energy_regions(read_file(outfile));
    if (regions.empty()) {
      Diag::global().warn("no regions parsed for backend '" + backend +
                          "'; rows omitted");
      continue;
    }
    for (const auto& r : regions) {
      EnergyRecord rec;
      rec.loop_id = r.name;
      rec.backend = backend;
      rec.pkg_energy_J = r.pkg_energy_J;
      rec.dram_energy_J = r.dram_energy_J;
      rec.elapsed_s = r.elapsed_s;
      if (r.elapsed_s > 0)
        rec.avg_power_W = (r.pkg_energy_J + r.dram_energy_J) / r.elapsed_s;
      else
        rec.avg_power_W = 0;  // degenerate region, flagged as zero power
      records.push_back(rec);
    }
  }
  return records;
}

inline std::string format_energy_csv(std::vector<EnergyRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const EnergyRecord& a, const EnergyRecord& b) {
              if (a.loop_id != b.loop_id) return a.loop_id < b.loop_id;
              return a.backend < b.backend;
            });
  std::string out = "loop_id,backend,pkg_energy_J,dram_energy_J,elapsed_s,avg_power_W\n";
  for (const auto& r : records)
    out += r.loop_id + "," + r.backend + "," + format_double(r.pkg_energy_J) +
           "," + format_double(r.dram_energy_J) + "," + format_double(r.elapsed_s) +
           "," + format_double(r.avg_power_W) + "\n";
  return out;
}

inline void emit_energy_csv(const std::vector<EnergyRecord>& records,
                            const fs::path& path) {
  write_file(path, format_energy_csv(records));
}

}  // namespace mc
