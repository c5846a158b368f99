#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "mc/backends.hpp"
#include "mc/common.hpp"
#include "mc/compilejobs.hpp"
#include "mc/energy.hpp"
#include "mc/extract.hpp"
#include "mc/fsutil.hpp"
#include "mc/mlopt.hpp"
#include "mc/parser.hpp"
#include "mc/process.hpp"
#include "mc/profiler.hpp"
#include "mc/reports.hpp"
#include "mc/runtime_headers.hpp"
#include "mc/synth.hpp"

namespace mc {

struct RunConfig {
  std::vector<std::string> sources;
  std::string output_path;
  bool compile_only = false;
  bool predict = false;
  bool power_profile = false;
  bool parallel = false;
  bool openmp = false;
  bool advanced_profile_only = false;
  std::string train_csv;
  std::string train_mode = "serial";
  std::string input_args_text;
  int runs = 3;
  unsigned pool_size = 0;  // 0: logical CPUs
  std::string backend_config;
  std::string model_path;
  uint64_t seed = 42;
  int n_trees = 100;
  std::vector<std::string> compile_flags;  // -I/-D, forwarded to every compile
  std::vector<std::string> link_flags;     // -L/-l, forwarded to the link
  std::string workdir;
  int min_loop_lines = 0;
};

inline std::string usage_text() {
  return
      "usage: mc [sources...] [options]\n"
      "\n"
      "modes (default: profile-guided search)\n"
      "  -c                       compile candidates only, emit a manifest per source\n"
      "  --predict                choose backends with a trained model (needs --model)\n"
      "  --power-profile          build energy-instrumented variants and report J/W per loop\n"
      "  --train <csv>            train a model from a dataset CSV (with --mode, --seed)\n"
      "  --advanced-profile-only  collect per-loop hardware counters, then stop\n"
      "\n"
      "options\n"
      "  -o <path>                output executable / model / report path\n"
      "  --input \"<args>\"         arguments passed to profiled runs of the app\n"
      "  --model <path>           model file for --predict\n"
      "  --mode serial|parallel   training target set (default serial)\n"
      "  --parallel               use each backend's auto-parallelization flags\n"
      "  --openmp                 honor OpenMP pragmas (backend OpenMP flags)\n"
      "  --runs <n>               profiling runs per backend (default 3)\n"
      "  -j <n>                   compile pool size (default: logical CPUs)\n"
      "  --seed <n>               training seed (default 42)\n"
      "  --trees <n>              forest size for --train (default 100)\n"
      "  --backend-config <path>  backend registry TSV (see docs/backends.md)\n"
      "  --workdir <dir>          scratch directory (default <output>.work)\n"
      "  --min-loop-lines <n>     skip nests shorter than n lines (default 0 = off)\n"
      "  -I/-D/-L/-l...           forwarded to compiles (-I, -D) and link (-L, -l)\n";
}

inline RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  auto need_value = [&](size_t& i, const std::string& flag) -> std::string {
    if (i + 1 >= args.size()) throw UsageError(flag + " requires a value");
    return args[++i];
  };
  auto need_int = [&](size_t& i, const std::string& flag) {
    uint64_t v = 0;
    if (!parse_u64(need_value(i, flag), v))
      throw UsageError(flag + " requires an integer value");
    return v;
  };
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "-o") cfg.output_path = need_value(i, a);
    else if (a == "-c") cfg.compile_only = true;
    else if (a == "--predict") cfg.predict = true;
    else if (a == "--power-profile") cfg.power_profile = true;
    else if (a == "--parallel") cfg.parallel = true;
    else if (a == "--openmp") cfg.openmp = true;
    else if (a == "--advanced-profile-only") cfg.advanced_profile_only = true;
    else if (a == "--train") cfg.train_csv = need_value(i, a);
    else if (a == "--mode") cfg.train_mode = need_value(i, a);
    else if (a == "--input") cfg.input_args_text = need_value(i, a);
    else if (a == "--model") cfg.model_path = need_value(i, a);
    else if (a == "--backend-config") cfg.backend_config = need_value(i, a);
    else if (a == "--workdir") cfg.workdir = need_value(i, a);
    else if (a == "--runs") cfg.runs = static_cast<int>(need_int(i, a));
    else if (a == "-j") cfg.pool_size = static_cast<unsigned>(need_int(i, a));
    else if (a == "--seed") cfg.seed = need_int(i, a);
    else if (a == "--trees") cfg.n_trees = static_cast<int>(need_int(i, a));
    else if (a == "--min-loop-lines")
      cfg.min_loop_lines = static_cast<int>(need_int(i, a));
    else if (a == "-I" || a == "-D")
      cfg.compile_flags.push_back(a + need_value(i, a));
    else if (starts_with(a, "-I") || starts_with(a, "-D"))
      cfg.compile_flags.push_back(a);
    else if (a == "-L" || a == "-l")
      cfg.link_flags.push_back(a + need_value(i, a));
    else if (starts_with(a, "-L") || starts_with(a, "-l"))
      cfg.link_flags.push_back(a);
    else if (!a.empty() && a[0] == '-')
      throw UsageError("unknown option '" + a + "'");
    else
      cfg.sources.push_back(a);
  }

  // mode exclusivity is enforced before any work starts
  bool train = !cfg.train_csv.empty();
  if (train && (cfg.predict || cfg.power_profile || cfg.compile_only ||
                cfg.advanced_profile_only || !cfg.sources.empty()))
    throw UsageError("--train cannot be combined with other modes or sources");
  if (cfg.parallel && cfg.openmp)
    throw UsageError("--parallel and --openmp are mutually exclusive");
  if (cfg.predict && cfg.power_profile)
    throw UsageError("--predict and --power-profile are mutually exclusive");
  if (cfg.compile_only && (cfg.predict || cfg.power_profile || cfg.advanced_profile_only))
    throw UsageError("-c only compiles; selection flags belong on the link step");
  if (cfg.predict && cfg.model_path.empty())
    throw UsageError("--predict requires --model <path>");
  if (cfg.runs < 1) throw UsageError("--runs must be >= 1");
  if (train) {
    if (cfg.train_mode != "serial" && cfg.train_mode != "parallel")
      throw UsageError("--mode must be 'serial' or 'parallel'");
    return cfg;
  }
  if (cfg.sources.empty()) throw UsageError("no input files");
  bool manifests = true, c_files = true;
  for (const auto& s : cfg.sources) {
    if (ends_with(s, ".manifest")) c_files = false;
    else manifests = false;
  }
  if (!manifests && !c_files)
    throw UsageError("cannot mix .manifest inputs with source files");
  if (cfg.compile_only && manifests)
    throw UsageError("-c takes source files, not manifests");
  if (cfg.compile_only && !cfg.output_path.empty() && cfg.sources.size() > 1)
    throw UsageError("-c with -o requires a single source file");
  return cfg;
}

namespace detail {

struct SourceUnit {
  std::string path;
  std::string stem;
  ParsedUnit unit;
  FileArtifacts fa;
};

}  // namespace detail

class Driver {
public:
  Driver(RunConfig cfg, ProcessRunner& runner) : cfg_(std::move(cfg)), runner_(runner) {
    if (cfg_.pool_size == 0) {
      unsigned hw = std::thread::hardware_concurrency();
      cfg_.pool_size = hw ? hw : 2;
    }
  }

  int run() {
    if (!cfg_.train_csv.empty()) return run_train();
    load_registry();
    setup_workdir();
    bool manifest_link = ends_with(cfg_.sources.front(), ".manifest");
    if (manifest_link) return run_link_manifests();
    extract_all();
    write_artifact_sources();
    if (cfg_.compile_only) return run_compile_only();
    if (cfg_.power_profile) return run_power_profile();
    if (cfg_.advanced_profile_only) return run_counters_only();
    if (cfg_.predict) return run_predict();
    return run_profile_search();
  }

private:
  RunConfig cfg_;
  ProcessRunner& runner_;
  Registry reg_;
  fs::path workdir_, src_dir_, obj_dir_, exe_dir_, prof_dir_, report_dir_;
  std::vector<detail::SourceUnit> units_;
  std::vector<std::string> loops_;  // eligible loop ids, source order

  CompileMode mode() const {
    if (cfg_.openmp) return CompileMode::OpenMP;
    if (cfg_.parallel) return CompileMode::Parallel;
    return CompileMode::Serial;
  }

  // parallel mode: a backend without auto-par support compiles serially only
  // when it is the fallback default; it is never a candidate.
  CompileMode mode_for(const BackendSpec& spec) const {
    CompileMode m = mode();
    if (m == CompileMode::Parallel && !spec.supports_parallel())
      return CompileMode::Serial;
    return m;
  }

  std::vector<std::string> input_args() const {
    return split_ws(cfg_.input_args_text);
  }

  std::vector<std::string> compile_flags() const {
    std::vector<std::string> flags{"-I" + (workdir_ / "support").string()};
    flags.insert(flags.end(), cfg_.compile_flags.begin(), cfg_.compile_flags.end());
    return flags;
  }

  void load_registry() {
    reg_ = cfg_.backend_config.empty() ? default_registry()
                                       : load_backend_config(cfg_.backend_config);
  }

  void setup_workdir() {
    if (!cfg_.workdir.empty())
      workdir_ = cfg_.workdir;
    else if (!cfg_.output_path.empty())
      workdir_ = cfg_.output_path + ".work";
    else
      workdir_ = "mc.work";
    src_dir_ = workdir_ / "src";
    obj_dir_ = workdir_ / "obj";
    exe_dir_ = workdir_ / "exe";
    prof_dir_ = workdir_ / "prof";
    report_dir_ = workdir_ / "report";
    for (const auto& d : {workdir_, src_dir_, obj_dir_, exe_dir_, prof_dir_, report_dir_})
      ensure_dir(d);
    write_support_headers(workdir_ / "support");
  }

  void extract_all() {
    EligibilityConfig ecfg;
    ecfg.min_loop_lines = cfg_.min_loop_lines;
    std::set<std::string> stems;
    for (size_t i = 0; i < cfg_.sources.size(); ++i) {
      const std::string& path = cfg_.sources[i];
      std::string stem = fs::path(path).stem().string();
      if (!stems.insert(sanitize_ident(stem)).second)
        throw UsageError("duplicate source stem '" + stem +
                         "': loop ids would collide");
      detail::SourceUnit su;
      su.path = path;
      su.stem = stem;
      try {
        su.unit = parse_unit(read_file(path), static_cast<int>(i));
      } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
      }
      su.fa = generate_artifacts(su.unit, stem, ecfg);
      int eligible = 0;
      for (const auto& nest : su.fa.nests)
        if (nest.eligible) {
          ++eligible;
          loops_.push_back(nest.loop_id);
        }
      std::printf("[extract] %s: %zu nests, %d eligible\n", path.c_str(),
                  su.fa.nests.size(), eligible);
      for (const auto& nest : su.fa.nests)
        if (!nest.eligible)
          std::printf("[extract]   %s skipped (%s)\n", nest.loop_id.c_str(),
                      join(nest.ineligibility_reasons, ",").c_str());
      units_.push_back(std::move(su));
    }
  }

  fs::path loop_src(const std::string& loop, const char* variant) const {
    return src_dir_ / (loop + "." + variant + ".c");
  }
  fs::path base_src(const std::string& stem) const {
    return src_dir_ / (stem + ".base.c");
  }
  fs::path loop_obj(const std::string& loop, const std::string& backend,
                    const char* variant) const {
    return obj_dir_ / (loop + "." + backend + "." + variant + ".o");
  }
  fs::path base_obj(const std::string& stem, const std::string& backend) const {
    return obj_dir_ / (stem + ".base." + backend + ".o");
  }

  void write_artifact_sources() {
    for (const auto& su : units_) {
      write_file(base_src(su.stem), su.fa.artifacts.base_file);
      for (const auto& [loop, v] : su.fa.artifacts.loop_files) {
        write_file(loop_src(loop, "clean"), v.clean);
        write_file(loop_src(loop, "timed"), v.timed);
        write_file(loop_src(loop, "energized"), v.energized);
      }
    }
  }

  // Base objects always come from the default backend.
  std::vector<std::string> compile_bases(CompileMode m, bool fatal_guidance) {
    const BackendSpec& def = reg_.default_backend();
    std::vector<CompileJob> jobs;
    for (const auto& su : units_)
      jobs.push_back({def.name, m == CompileMode::BaselineO1 ? m : mode_for(def),
                      base_src(su.stem).string(), base_obj(su.stem, def.name).string(),
                      "", "base", compile_flags()});
    auto results = compile_all(jobs, reg_, runner_, cfg_.pool_size);
    std::vector<std::string> objs;
    for (size_t i = 0; i < results.size(); ++i) {
      if (!results[i].ok) {
        std::string msg = "base file " + jobs[i].source_path +
                          " failed to compile with default backend '" + def.name +
                          "':\n" + results[i].diagnostics;
        if (results[i].backend_unavailable && fatal_guidance)
          msg += "\nThe default backend's driver is not on PATH. Point "
                 "--backend-config at a registry describing the toolchains "
                 "installed here.";
        throw CompileFailed(msg);
      }
      objs.push_back(results[i].object_path);
    }
    return objs;
  }

  // Compiles one variant of every eligible loop under every candidate backend.
  // Returns objects[loop][backend] and drops backends that failed anywhere.
  std::map<std::string, std::map<std::string, std::string>> compile_loop_candidates(
      const char* variant, std::vector<std::string>& alive,
      const std::vector<std::string>& extra_defines) {
    std::vector<CompileJob> jobs;
    for (const auto& b : reg_.backends) {
      if (mode() == CompileMode::Parallel && !b.supports_parallel()) {
        Diag::global().warn("backend '" + b.name +
                            "' has no auto-parallelization flags; not a candidate");
        continue;
      }
      for (const auto& loop : loops_) {
        auto flags = compile_flags();
        flags.insert(flags.end(), extra_defines.begin(), extra_defines.end());
        jobs.push_back({b.name, mode_for(b), loop_src(loop, variant).string(),
                        loop_obj(loop, b.name, variant).string(), loop, variant,
                        flags});
      }
    }
    auto results = compile_all(jobs, reg_, runner_, cfg_.pool_size);
    std::map<std::string, std::map<std::string, std::string>> objects;
    std::map<std::string, std::string> failure;
    for (size_t i = 0; i < results.size(); ++i) {
      if (results[i].ok)
        objects[jobs[i].loop_id][jobs[i].backend] = results[i].object_path;
      else if (!failure.count(jobs[i].backend))
        failure[jobs[i].backend] = jobs[i].loop_id + ": " + results[i].diagnostics;
    }
    for (const auto& b : reg_.backends) {
      if (mode() == CompileMode::Parallel && !b.supports_parallel()) continue;
      auto f = failure.find(b.name);
      if (f != failure.end()) {
        Diag::global().warn("backend '" + b.name + "' excluded (" + f->second + ")");
        for (auto& [_, per_backend] : objects) per_backend.erase(b.name);
      } else if (!loops_.empty()) {
        alive.push_back(b.name);
      }
      std::printf("[optimize] %s: %s\n", b.name.c_str(),
                  f == failure.end() ? "ok" : "excluded");
    }
    return objects;
  }

  void link_objects(const std::vector<std::string>& objects,
                    const std::vector<std::string>& libs, const std::string& out) {
    LinkPlan lp;
    lp.objects = objects;
    lp.libs = libs;
    lp.output_path = out;
    link(lp, reg_, runner_);
  }

  std::vector<std::string> libs_for(const std::vector<std::string>& backend_names) {
    std::set<std::string> seen;
    std::vector<std::string> libs;
    auto add = [&](const std::string& s) {
      if (seen.insert(s).second) libs.push_back(s);
    };
    for (const auto& name : backend_names)
      if (const BackendSpec* spec = reg_.find(name))
        for (const auto& lib : spec->link_libs) add(lib);
    for (const auto& lib : reg_.default_backend().link_libs) add(lib);
    for (const auto& flag : cfg_.link_flags) add(flag);
    return libs;
  }

  std::string default_output(const char* fallback) const {
    return cfg_.output_path.empty() ? fallback : cfg_.output_path;
  }

  // Profiled executables: one per live backend, its timed loop objects plus
  // the default-compiled base objects.
  std::map<std::string, std::string> link_per_backend_exes(
      const std::map<std::string, std::map<std::string, std::string>>& objects,
      const std::vector<std::string>& alive, const std::vector<std::string>& bases,
      const char* tag) {
    std::map<std::string, std::string> exes;
    for (const auto& b : alive) {
      std::vector<std::string> objs;
      bool complete = true;
      for (const auto& loop : loops_) {
        auto li = objects.find(loop);
        if (li == objects.end() || !li->second.count(b)) {
          complete = false;
          break;
        }
        objs.push_back(li->second.at(b));
      }
      if (!complete) continue;
      objs.insert(objs.end(), bases.begin(), bases.end());
      fs::path exe = exe_dir_ / (std::string(tag) + "." + b);
      try {
        link_objects(objs, libs_for({b}), exe.string());
        exes[b] = exe.string();
      } catch (const Error& e) {
        Diag::global().warn("backend '" + b + "' excluded at link: " + e.what());
      }
    }
    return exes;
  }

  TimingTable profile_backends(const std::map<std::string, std::string>& exes) {
    TimingTable table;
    table.runs = cfg_.runs;
    for (const auto& [backend, exe] : exes) {
      try {
        auto fragment = run_profiled(exe, input_args(), cfg_.runs, runner_,
                                     prof_dir_, "profiled." + backend);
        for (const auto& [loop, totals] : fragment)
          for (uint64_t t : totals) table.add(loop, backend, t);
        std::printf("[profile] %s: %d runs\n", backend.c_str(), cfg_.runs);
      } catch (const RunFailed& e) {
        Diag::global().warn("backend '" + backend + "' excluded (" + e.what() + ")");
        std::printf("[profile] %s: failed\n", backend.c_str());
      }
    }
    return table;
  }

  // Clean objects for exactly the chosen (loop, backend) pairs.
  std::map<std::string, std::map<std::string, std::string>> compile_chosen_clean(
      const SelectionPlan& plan) {
    std::vector<CompileJob> jobs;
    for (const auto& [loop, choice] : plan.choices) {
      const BackendSpec* spec = reg_.find(choice.backend);
      if (!spec) throw CompileFailed("chosen backend '" + choice.backend + "' missing");
      jobs.push_back({choice.backend, mode_for(*spec), loop_src(loop, "clean").string(),
                      loop_obj(loop, choice.backend, "clean").string(), loop, "clean",
                      compile_flags()});
    }
    auto results = compile_all(jobs, reg_, runner_, cfg_.pool_size);
    std::map<std::string, std::map<std::string, std::string>> objects;
    for (size_t i = 0; i < results.size(); ++i) {
      if (!results[i].ok)
        throw CompileFailed("clean build of " + jobs[i].loop_id + " under '" +
                            jobs[i].backend + "' failed:\n" + results[i].diagnostics);
      objects[jobs[i].loop_id][jobs[i].backend] = results[i].object_path;
    }
    return objects;
  }

  void finish_selection(SelectionPlan& plan, const TimingTable& table,
                        const std::vector<std::string>& bases) {
    apply_compat(plan, reg_, mode());
    for (const auto& [loop, choice] : plan.choices)
      std::printf("[select] %s -> %s (%s)\n", loop.c_str(), choice.backend.c_str(),
                  choice.reason.c_str());
    auto clean_objects = compile_chosen_clean(plan);
    std::vector<std::string> chosen;
    for (const auto& [_, choice] : plan.choices) chosen.push_back(choice.backend);
    std::string out = default_output("a.out");
    LinkPlan lp = build_link_plan(plan, clean_objects, bases, libs_for(chosen), reg_,
                                  out);
    link(lp, reg_, runner_);
    emit_selection_report(plan, table, report_dir_ / "selection.csv");
    emit_timing_dump(table, report_dir_ / "timing.csv");
    std::printf("[link] %s\n", out.c_str());
    std::printf("[report] %s\n", (report_dir_ / "selection.csv").string().c_str());
  }

  int run_profile_search() {
    auto bases = compile_bases(mode(), true);
    std::vector<std::string> alive;
    auto timed = compile_loop_candidates("timed", alive, {});
    auto exes = link_per_backend_exes(timed, alive, bases, "profiled");
    TimingTable table = profile_backends(exes);
    SelectionPlan plan =
        select_by_profile(table, loops_, reg_.default_backend().name);
    finish_selection(plan, table, bases);
    flush_warnings();
    return 0;
  }

  // Baseline for counters: default backend at -O1, marker-instrumented loops.
  std::string build_counter_baseline() {
    auto bases = compile_bases(CompileMode::BaselineO1, true);
    const BackendSpec& def = reg_.default_backend();
    std::vector<CompileJob> jobs;
    for (const auto& loop : loops_)
      jobs.push_back({def.name, CompileMode::BaselineO1,
                      loop_src(loop, "energized").string(),
                      loop_obj(loop, def.name, "energized").string(), loop,
                      "energized", compile_flags()});
    auto results = compile_all(jobs, reg_, runner_, cfg_.pool_size);
    std::vector<std::string> objs;
    for (size_t i = 0; i < results.size(); ++i) {
      if (!results[i].ok)
        throw CompileFailed("baseline build of " + jobs[i].loop_id + " failed:\n" +
                            results[i].diagnostics);
      objs.push_back(results[i].object_path);
    }
    objs.insert(objs.end(), bases.begin(), bases.end());
    fs::path exe = exe_dir_ / "baseline.o1";
    link_objects(objs, libs_for({def.name}), exe.string());
    return exe.string();
  }

  int run_counters_only() {
    std::string exe = build_counter_baseline();
    fs::path out = default_output((report_dir_ / "counters.csv").string().c_str());
    auto counters =
        collect_counters(reg_.provider_template, exe, input_args(), out, runner_);
    std::printf("[counters] %zu loops -> %s\n", counters.size(), out.string().c_str());
    flush_warnings();
    return 0;
  }

  int run_predict() {
    ForestModel model = load_model(cfg_.model_path);
    std::string want = cfg_.parallel ? "parallel" : "serial";
    if (model.mode != want)
      throw UsageError("model '" + cfg_.model_path + "' was trained for mode '" +
                       model.mode + "', not '" + want + "'");
    auto bases = compile_bases(mode(), true);
    std::string exe = build_counter_baseline();
    auto counters = collect_counters(reg_.provider_template, exe, input_args(),
                                     prof_dir_ / "counters.csv", runner_);
    std::set<std::string> known(loops_.begin(), loops_.end());
    std::vector<FeatureVector> fvs;
    for (const auto& cs : counters) {
      if (!known.count(cs.loop_id)) {
        Diag::global().warn("provider reported unknown region '" + cs.loop_id + "'");
        continue;
      }
      try {
        fvs.push_back(normalize_pki(cs, model.schema));
      } catch (const ZeroInstructions& e) {
        Diag::global().warn(std::string(e.what()) + "; falling back to default");
      }
    }
    SelectionPlan plan =
        select_by_prediction(model, fvs, loops_, reg_.default_backend().name);
    finish_selection(plan, TimingTable{}, bases);
    flush_warnings();
    return 0;
  }

  int run_power_profile() {
    auto bases = compile_bases(mode(), true);
    std::vector<std::string> defines;
    if (!reg_.energy_macro.empty()) defines.push_back("-D" + reg_.energy_macro);
    std::vector<std::string> alive;
    auto energized = compile_loop_candidates("energized", alive, defines);
    auto exes = link_per_backend_exes(energized, alive, bases, "energized");
    auto records = run_energy_profile(exes, reg_.energy_tool_template, input_args(),
                                      runner_, prof_dir_);
    fs::path out = default_output((report_dir_ / "energy.csv").string().c_str());
    emit_energy_csv(records, out);
    std::printf("[energy] %zu rows -> %s\n", records.size(), out.string().c_str());
    flush_warnings();
    return 0;
  }

  int run_compile_only() {
    const BackendSpec& def = reg_.default_backend();
    for (const auto& su : units_) {
      std::vector<std::string> unit_loops;
      for (const auto& nest : su.fa.nests)
        if (nest.eligible) unit_loops.push_back(nest.loop_id);
      std::vector<CompileJob> jobs;
      for (const auto& b : reg_.backends) {
        if (mode() == CompileMode::Parallel && !b.supports_parallel()) continue;
        for (const auto& loop : unit_loops)
          for (const char* variant : {"timed", "clean"})
            jobs.push_back({b.name, mode_for(b), loop_src(loop, variant).string(),
                            loop_obj(loop, b.name, variant).string(), loop, variant,
                            compile_flags()});
      }
      jobs.push_back({def.name, mode_for(def), base_src(su.stem).string(),
                      base_obj(su.stem, def.name).string(), "", "base",
                      compile_flags()});
      auto results = compile_all(jobs, reg_, runner_, cfg_.pool_size);
      std::vector<ManifestRow> rows;
      for (size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) {
          if (jobs[i].variant == "base")
            throw CompileFailed("base file of " + su.path + " failed:\n" +
                                results[i].diagnostics);
          Diag::global().warn("manifest omits " + jobs[i].loop_id + " under '" +
                              jobs[i].backend + "': compile failed");
          continue;
        }
        rows.push_back({jobs[i].variant == std::string("base") ? "base:" + su.stem
                                                               : jobs[i].loop_id,
                        jobs[i].backend, results[i].object_path, jobs[i].variant});
      }
      fs::path out = cfg_.output_path.empty()
                         ? workdir_ / (su.stem + ".manifest")
                         : fs::path(cfg_.output_path);
      write_file(out, format_manifest(rows));
      std::printf("[manifest] %s (%zu rows)\n", out.string().c_str(), rows.size());
    }
    flush_warnings();
    return 0;
  }

  int run_link_manifests() {
    std::vector<ManifestRow> rows;
    for (const auto& path : cfg_.sources)
      for (auto& r : parse_manifest(read_file(path))) rows.push_back(std::move(r));
    std::map<std::string, std::map<std::string, std::string>> timed, clean;
    std::vector<std::string> bases;
    std::set<std::string> seen_loops;
    for (const auto& r : rows) {
      if (r.variant == "base") {
        bases.push_back(r.object_path);
      } else if (r.variant == "timed" || r.variant == "clean") {
        (r.variant == "timed" ? timed : clean)[r.loop_id][r.backend] = r.object_path;
        if (seen_loops.insert(r.loop_id).second) loops_.push_back(r.loop_id);
      } else {
        throw IoError("manifest row with unknown variant '" + r.variant + "'");
      }
    }
    if (bases.empty()) throw IoError("manifests carry no base objects");
    std::set<std::string> backends;
    for (const auto& [_, per_backend] : timed)
      for (const auto& [b, __] : per_backend) backends.insert(b);
    std::vector<std::string> alive(backends.begin(), backends.end());
    auto exes = link_per_backend_exes(timed, alive, bases, "profiled");
    TimingTable table = profile_backends(exes);
    SelectionPlan plan =
        select_by_profile(table, loops_, reg_.default_backend().name);
    apply_compat(plan, reg_, mode());
    for (const auto& [loop, choice] : plan.choices)
      std::printf("[select] %s -> %s (%s)\n", loop.c_str(), choice.backend.c_str(),
                  choice.reason.c_str());
    // objects were already compiled at the -c step; just link the chosen ones
    std::vector<std::string> chosen;
    for (const auto& [_, choice] : plan.choices) chosen.push_back(choice.backend);
    std::string out = default_output("a.out");
    LinkPlan lp = build_link_plan(plan, clean, bases, libs_for(chosen), reg_, out);
    link(lp, reg_, runner_);
    emit_selection_report(plan, table, report_dir_ / "selection.csv");
    emit_timing_dump(table, report_dir_ / "timing.csv");
    std::printf("[link] %s\n", out.c_str());
    flush_warnings();
    return 0;
  }

  int run_train() {
    Dataset ds = parse_dataset_csv(read_file(cfg_.train_csv));
    auto allowed = cfg_.train_mode == "parallel" ? parallel_targets() : serial_targets();
    auto instances = label_and_relabel(dataset_to_instances(ds), allowed);
    ForestParams params;
    params.seed = cfg_.seed;
    params.n_trees = cfg_.n_trees;
    ForestModel model = train(instances, params, ds.schema, cfg_.train_mode);
    std::string out = default_output("model.bin");
    save_model(model, out);
    std::printf("[train] %zu instances, %zu classes\n", instances.size(),
                model.class_labels.size());
    std::printf("[train] oob_accuracy %s\n", format_double(model.oob_accuracy).c_str());
    std::printf("[train] model -> %s\n", out.c_str());
    flush_warnings();
    return 0;
  }

  void flush_warnings() {
    for (const auto& w : Diag::global().warnings())
      std::fprintf(stderr, "mc: warning: %s\n", w.c_str());
  }
};

// CLI entry used by the mc tool and by tests; maps errors to exit codes.
inline int run_cli(const std::vector<std::string>& args, ProcessRunner& runner) {
  for (const auto& a : args)
    if (a == "--help" || a == "-h") {
      std::fputs(usage_text().c_str(), stdout);
      return 0;
    }
  try {
    RunConfig cfg = parse_args(args);
    Driver driver(std::move(cfg), runner);
    return driver.run();
  } catch (const UsageError& e) {
    std::fprintf(stderr, "mc: %s\n\n%s", e.what(), usage_text().c_str());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "mc: error: %s\n", e.what());
    return 1;
  }
}

}  // namespace mc
