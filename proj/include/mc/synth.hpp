#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mc/backends.hpp"
#include "mc/common.hpp"
#include "mc/compilejobs.hpp"
#include "mc/mlopt.hpp"
#include "mc/process.hpp"
#include "mc/profiler.hpp"

namespace mc {

struct Choice {
  std::string backend;
  std::string reason;  // profiled | predicted | default_fallback
};

struct SelectionPlan {
  std::map<std::string, Choice> choices;
  std::string default_backend;
};

// Procedure: select_by_profile. Fastest median wins; a loop with no timings
// anywhere falls back to the default backend. Ties prefer the default, then
// the lexicographically first name.
inline SelectionPlan select_by_profile(const TimingTable& table,
                                       const std::vector<std::string>& loops,
                                       const std::string& default_backend) {
  SelectionPlan plan;
  plan.default_backend = default_backend;
  for (const auto& loop : loops) {
    std::map<std::string, uint64_t> medians;
    for (const auto& [key, samples] : table.entries)
      if (key.first == loop && !samples.empty())
        medians[key.second] = median_ns(samples);
    if (medians.empty()) {
      plan.choices[loop] = {default_backend, "default_fallback"};
      continue;
    }
    uint64_t best = medians.begin()->second;
    for (const auto& [_, ns] : medians) best = std::min(best, ns);
    std::string chosen;
    for (const auto& [backend, ns] : medians)
      if (ns == best) {
        if (chosen.empty()) chosen = backend;  // lexicographic: map order
        if (backend == default_backend) chosen = default_backend;
      }
    plan.choices[loop] = {chosen, "profiled"};
  }
  return plan;
}

// Procedure: select_by_prediction. Loops with a feature vector get the model's
// vote; loops without counters fall back to the default backend.
inline SelectionPlan select_by_prediction(const ForestModel& model,
                                          const std::vector<FeatureVector>& fvs,
                                          const std::vector<std::string>& loops,
                                          const std::string& default_backend) {
  SelectionPlan plan;
  plan.default_backend = default_backend;
  std::map<std::string, const FeatureVector*> by_loop;
  for (const auto& fv : fvs) by_loop[fv.loop_id] = &fv;
  for (const auto& loop : loops) {
    auto it = by_loop.find(loop);
    if (it == by_loop.end())
      plan.choices[loop] = {default_backend, "default_fallback"};
    else
      plan.choices[loop] = {predict(model, *it->second), "predicted"};
  }
  return plan;
}

// OpenMP runtime compatibility: in modes that pull in an OpenMP runtime,
// backends whose compat group differs from the default's cannot be mixed into
// one executable and are demoted to the default (the reason is kept).
inline void apply_compat(SelectionPlan& plan, const Registry& reg, CompileMode mode) {
  if (mode != CompileMode::OpenMP && mode != CompileMode::Parallel) return;
  const BackendSpec* def = reg.find(plan.default_backend);
  if (!def) return;
  for (auto& [loop, choice] : plan.choices) {
    if (choice.backend == plan.default_backend) continue;
    const BackendSpec* spec = reg.find(choice.backend);
    if (!spec || spec->compat_group != def->compat_group) {
      Diag::global().warn("loop " + loop + ": backend '" + choice.backend +
                          "' uses an OpenMP runtime incompatible with '" +
                          plan.default_backend + "', demoting to the default");
      choice.backend = plan.default_backend;
    }
  }
}

struct LinkPlan {
  std::vector<std::string> objects;
  std::vector<std::string> libs;
  std::string output_path;
};

// Objects: one chosen clean object per loop (plan order), then the
// default-compiled base objects. Libs: first-occurrence dedup of the chosen
// backends' runtime libs plus user flags.
inline LinkPlan build_link_plan(
    const SelectionPlan& plan,
    const std::map<std::string, std::map<std::string, std::string>>& loop_objects,
    const std::vector<std::string>& base_objects,
    const std::vector<std::string>& user_link_flags, const Registry& reg,
    const std::string& output_path) {
  LinkPlan lp;
  lp.output_path = output_path;
  std::set<std::string> seen;
  auto add_lib = [&](const std::string& lib) {
    if (seen.insert(lib).second) lp.libs.push_back(lib);
  };
  for (const auto& [loop, choice] : plan.choices) {
    auto li = loop_objects.find(loop);
    if (li == loop_objects.end() || !li->second.count(choice.backend))
      throw LinkFailed("no clean object for loop " + loop + " under backend '" +
                       choice.backend + "'");
    lp.objects.push_back(li->second.at(choice.backend));
    if (const BackendSpec* spec = reg.find(choice.backend))
      for (const auto& lib : spec->link_libs) add_lib(lib);
  }
  lp.objects.insert(lp.objects.end(), base_objects.begin(), base_objects.end());
  for (const auto& flag : user_link_flags) add_lib(flag);
  return lp;
}

// Procedure: link. One invocation of the default backend's driver. A mock
// default emits the runnable stand-in script instead of spawning a linker.
inline void link(const LinkPlan& lp, const Registry& reg, ProcessRunner& runner) {
  const BackendSpec& def = reg.default_backend();
  if (def.kind == BackendKind::Mock) {
    link_mock_executable(lp.objects, lp.output_path);
    return;
  }
  const BackendSpec* driver = &def;
  if (def.kind == BackendKind::SourceToSource) {
    driver = reg.find(def.downstream);
    if (!driver)
      throw LinkFailed("default backend has no downstream driver for linking");
  }
  std::vector<std::string> argv{driver->driver_binary()};
  argv.insert(argv.end(), lp.objects.begin(), lp.objects.end());
  argv.push_back("-o");
  argv.push_back(lp.output_path);
  argv.insert(argv.end(), lp.libs.begin(), lp.libs.end());
  RunResult res = runner.run(argv);
  if (res.spawn_failed)
    throw LinkFailed("linker '" + argv[0] + "' cannot be executed: " + res.output);
  if (res.exit_code != 0)
    throw LinkFailed("link exited " + std::to_string(res.exit_code) + ":\n" +
                     res.output);
  if (!fs::exists(lp.output_path))
    throw LinkFailed("linker produced no output at " + lp.output_path);
}

// ---- compile-only manifests ----------------------------------------------------

struct ManifestRow {
  std::string loop_id, backend, object_path, variant;
};

inline std::string format_manifest(const std::vector<ManifestRow>& rows) {
  std::string out;
  for (const auto& r : rows)
    out += r.loop_id + "\t" + r.backend + "\t" + r.object_path + "\t" + r.variant +
           "\n";
  return out;
}

inline std::vector<ManifestRow> parse_manifest(const std::string& text) {
  std::vector<ManifestRow> rows;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 4)
      throw IoError("malformed manifest line (want 4 tab-separated columns): " +
                    line);
    rows.push_back({cols[0], cols[1], cols[2], cols[3]});
  }
  return rows;
}

}  // namespace mc
