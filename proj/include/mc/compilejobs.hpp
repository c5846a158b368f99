#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mc/backends.hpp"
#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/process.hpp"

namespace mc {

enum class CompileMode { Serial, Parallel, OpenMP, BaselineO1 };

inline const char* compile_mode_name(CompileMode m) {
  switch (m) {
    case CompileMode::Serial: return "serial";
    case CompileMode::Parallel: return "parallel";
    case CompileMode::OpenMP: return "openmp";
    case CompileMode::BaselineO1: return "baseline_o1";
  }
  return "?";
}

struct CompileJob {
  std::string backend;
  CompileMode mode = CompileMode::Serial;
  std::string source_path;
  std::string object_path;
  std::string loop_id;  // empty for base files
  std::string variant;  // clean | timed | energized | base
  std::vector<std::string> extra_flags;
};

struct CompileResult {
  bool ok = false;
  bool backend_unavailable = false;
  std::string diagnostics;
  std::string object_path;
};

// ---- mock backend support -----------------------------------------------------

struct MockLedgerEntry {
  std::string backend, loop_id, variant, source, object;
};

// Global call record for mock compiles; lets tests assert ordering,
// cardinality, and concurrency bounds without real toolchains.
class MockLedger {
public:
  void record(MockLedgerEntry e) {
    std::lock_guard<std::mutex> lock(m_);
    entries_.push_back(std::move(e));
  }
  void enter() {
    int now = ++active_;
    int prev = max_active_.load();
    while (now > prev && !max_active_.compare_exchange_weak(prev, now)) {
    }
  }
  void leave() { --active_; }
  std::vector<MockLedgerEntry> snapshot() {
    std::lock_guard<std::mutex> lock(m_);
    return entries_;
  }
  int max_concurrency() const { return max_active_.load(); }
  void reset() {
    std::lock_guard<std::mutex> lock(m_);
    entries_.clear();
    active_ = 0;
    max_active_ = 0;
  }

private:
  std::mutex m_;
  std::vector<MockLedgerEntry> entries_;
  std::atomic<int> active_{0};
  std::atomic<int> max_active_{0};
};

inline MockLedger& mock_ledger() {
  static MockLedger ledger;
  return ledger;
}

// Mock profile spec: lines `loop_id<TAB>ns`; a loop absent from the file is
// "never executed" under that backend.
inline std::map<std::string, uint64_t> load_mock_profile(const fs::path& path) {
  static std::mutex m;
  static std::map<std::string, std::map<std::string, uint64_t>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(path.string());
  if (it != cache.end()) return it->second;
  std::map<std::string, uint64_t> prof;
  for (const auto& line : split_lines(read_file(path))) {
    std::string t(trim(line));
    if (t.empty() || t[0] == '#') continue;
    auto cols = split(t, '\t');
    uint64_t ns = 0;
    if (cols.size() == 2 && parse_u64(trim(cols[1]), ns))
      prof[trim(cols[0])] = ns;
  }
  cache[path.string()] = prof;
  return prof;
}

struct StubInfo {
  std::string backend, loop_id, variant;
  std::optional<uint64_t> ns;
};

inline StubInfo parse_stub(const fs::path& path) {
  StubInfo info;
  auto lines = split_lines(read_file(path));
  if (lines.empty() || trim(lines[0]) != "MCSTUB")
    throw CompileFailed("not a mock stub: " + path.string());
  for (size_t i = 1; i < lines.size(); ++i) {
    auto words = split_ws(lines[i]);
    if (words.size() < 2) continue;
    if (words[0] == "backend") info.backend = words[1];
    if (words[0] == "loop") info.loop_id = words[1];
    if (words[0] == "variant") info.variant = words[1];
    if (words[0] == "ns") {
      uint64_t v = 0;
      if (parse_u64(words[1], v)) info.ns = v;
    }
  }
  return info;
}

inline bool is_stub_file(const fs::path& path) {
  if (!fs::exists(path)) return false;
  std::string head = read_file(path).substr(0, 6);
  return starts_with(head, "MCSTUB");
}

// ---- compilation ------------------------------------------------------------------

inline std::vector<std::string> flags_for_mode(const BackendSpec& spec, CompileMode mode) {
  switch (mode) {
    case CompileMode::Serial: return spec.flags_serial;
    case CompileMode::Parallel: return spec.flags_parallel;
    case CompileMode::OpenMP: {
      auto f = spec.flags_serial;
      f.insert(f.end(), spec.flags_openmp.begin(), spec.flags_openmp.end());
      return f;
    }
    case CompileMode::BaselineO1: return {"-O1"};
  }
  return {};
}

inline CompileResult compile_mock(const CompileJob& job, const BackendSpec& spec) {
  CompileResult res;
  res.object_path = job.object_path;
  mock_ledger().enter();
  std::this_thread::sleep_for(std::chrono::milliseconds(2));
  if (!fs::exists(job.source_path)) {
    mock_ledger().leave();
    res.diagnostics = "source missing: " + job.source_path;
    return res;
  }
  fs::path profile_path = spec.command_template.substr(1);  // strip '@'
  std::map<std::string, uint64_t> prof;
  try {
    prof = load_mock_profile(profile_path);
  } catch (const Error& e) {
    mock_ledger().leave();
    res.diagnostics = e.what();
    return res;
  }
  std::string stub = "MCSTUB\n";
  stub += "backend " + spec.name + "\n";
  if (!job.loop_id.empty()) stub += "loop " + job.loop_id + "\n";
  stub += "variant " + (job.variant.empty() ? std::string("base") : job.variant) + "\n";
  auto it = prof.find(job.loop_id);
  if (it != prof.end()) stub += "ns " + std::to_string(it->second) + "\n";
  write_file(job.object_path, stub);
  mock_ledger().record({spec.name, job.loop_id, job.variant, job.source_path,
                        job.object_path});
  mock_ledger().leave();
  res.ok = true;
  return res;
}

// Procedure: compile. One job against one backend; failures are reported in
// the result, never thrown; a failed backend is excluded from selection.
inline CompileResult compile(const CompileJob& job, const BackendSpec& spec,
                             const Registry& reg, ProcessRunner& runner) {
  CompileResult res;
  res.object_path = job.object_path;
  if (job.mode == CompileMode::BaselineO1 && !spec.is_default) {
    res.diagnostics = "baseline_o1 is reserved for the default backend";
    return res;
  }
  if (spec.kind == BackendKind::Mock) return compile_mock(job, spec);

  auto run_step = [&](const BackendSpec& s, const std::string& input,
                      const std::string& output, CompileMode mode) -> bool {
    std::vector<std::string> flags = flags_for_mode(s, mode);
    flags.insert(flags.end(), job.extra_flags.begin(), job.extra_flags.end());
    auto argv = render_template(s.command_template,
                                {{"input", input}, {"output", output}},
                                {{"flags", flags}});
    RunResult r = runner.run(argv);
    if (r.spawn_failed) {
      res.backend_unavailable = true;
      res.diagnostics += s.name + ": " + r.output + "\n";
      return false;
    }
    if (r.exit_code != 0) {
      res.diagnostics += s.name + " exited " + std::to_string(r.exit_code) + ":\n" +
                         r.output + "\n";
      return false;
    }
    return true;
  };

  if (spec.kind == BackendKind::Direct) {
    if (!run_step(spec, job.source_path, job.object_path, job.mode)) return res;
  } else {
    // source_to_source: transform, then compile with the downstream backend
    const BackendSpec* down = reg.find(spec.downstream);
    if (!down) {
      res.diagnostics = "downstream backend '" + spec.downstream + "' missing";
      return res;
    }
    std::string transformed = job.object_path + ".opt.c";
    if (!run_step(spec, job.source_path, transformed, job.mode)) return res;
    if (!fs::exists(transformed)) {
      res.diagnostics += spec.name + " produced no output file\n";
      return res;
    }
    if (!run_step(*down, transformed, job.object_path, job.mode)) return res;
  }
  if (!fs::exists(job.object_path)) {
    res.diagnostics += "no object file produced\n";
    return res;
  }
  res.ok = true;
  return res;
}

// Procedure: compile_all. Bounded worker pool; result order always matches
// job order regardless of completion order.
inline std::vector<CompileResult> compile_all(const std::vector<CompileJob>& jobs,
                                              const Registry& reg,
                                              ProcessRunner& runner,
                                              unsigned pool_size) {
  if (pool_size < 1) pool_size = 1;
  std::vector<CompileResult> results(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      const BackendSpec* spec = reg.find(jobs[i].backend);
      if (!spec) {
        results[i].diagnostics = "unknown backend '" + jobs[i].backend + "'";
        results[i].backend_unavailable = true;
        continue;
      }
      try {
        results[i] = compile(jobs[i], *spec, reg, runner);
      } catch (const std::exception& e) {
        results[i].ok = false;
        results[i].diagnostics = e.what();
      }
    }
  };
  unsigned n = std::min<size_t>(pool_size, jobs.size() ? jobs.size() : 1);
  std::vector<std::thread> threads;
  for (unsigned t = 0; t + 1 < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  return results;
}

// Mock link: emits a shell script standing in for the composed/profiled
// executable. When run it appends one timing record per linked loop stub to
// $MC_PROFILE_OUT and a marker trace to $MC_MARKER_TRACE.
inline void link_mock_executable(const std::vector<std::string>& objects,
                                 const fs::path& output) {
  std::string script = "#!/bin/sh\n";
  std::vector<StubInfo> stubs;
  for (const auto& o : objects)
    if (is_stub_file(o)) stubs.push_back(parse_stub(o));
  script += "if [ -n \"$MC_PROFILE_OUT\" ]; then\n";
  for (const auto& s : stubs)
    if (!s.loop_id.empty() && s.ns)
      script += "  printf 'MC\\t" + s.loop_id + "\\t" + std::to_string(*s.ns) +
                "\\n' >> \"$MC_PROFILE_OUT\"\n";
  script += "fi\n";
  script += "if [ -n \"$MC_MARKER_TRACE\" ]; then\n";
  script += "  printf 'INIT\\n' >> \"$MC_MARKER_TRACE\"\n";
  for (const auto& s : stubs)
    if (!s.loop_id.empty() && s.ns)
      script += "  printf 'START\\t" + s.loop_id + "\\nSTOP\\t" + s.loop_id +
                "\\n' >> \"$MC_MARKER_TRACE\"\n";
  script += "  printf 'CLOSE\\n' >> \"$MC_MARKER_TRACE\"\n";
  script += "fi\n";
  script += "echo mc-mock-exe\n";
  write_file(output, script);
  fs::permissions(output, fs::perms::owner_all | fs::perms::group_read |
                              fs::perms::others_read);
}

}  // namespace mc
