#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/process.hpp"
#include "mc/strutil.hpp"

namespace mc {

enum class BackendKind { Direct, SourceToSource, Mock };

inline const char* backend_kind_name(BackendKind k) {
  switch (k) {
    case BackendKind::Direct: return "direct";
    case BackendKind::SourceToSource: return "source_to_source";
    case BackendKind::Mock: return "mock";
  }
  return "?";
}

inline BackendKind backend_kind_from(std::string_view s) {
  if (s == "direct") return BackendKind::Direct;
  if (s == "source_to_source") return BackendKind::SourceToSource;
  if (s == "mock") return BackendKind::Mock;
  throw UsageError("unknown backend kind '" + std::string(s) + "'");
}

struct BackendSpec {
  std::string name;
  BackendKind kind = BackendKind::Direct;
  // direct / source_to_source: command with {input} {output} {flags}
  // mock: "@<profile-path>" with per-loop synthetic timings
  std::string command_template;
  std::vector<std::string> flags_serial;
  std::vector<std::string> flags_parallel;  // empty = no auto-parallel support
  std::vector<std::string> flags_openmp;    // extra enable flags for OpenMP mode
  std::vector<std::string> link_libs;
  bool is_default = false;
  std::string downstream;     // source_to_source: direct backend that compiles
  std::string compat_group;   // OpenMP runtime family ("iomp", "gomp", "pgi")

  bool supports_parallel() const { return !flags_parallel.empty(); }
  std::string driver_binary() const {
    auto words = split_ws(command_template);
    return words.empty() ? std::string() : words.front();
  }
};

struct Registry {
  std::vector<BackendSpec> backends;
  std::string provider_template;     // counter provider: {exe} {args} {out_csv}
  std::string energy_tool_template;  // energy tool: {exe} {args} {out}
  std::string energy_macro;          // extra -D for energized builds, optional

  const BackendSpec* find(const std::string& name) const {
    for (const auto& b : backends)
      if (b.name == name) return &b;
    return nullptr;
  }
  BackendSpec* find_mut(const std::string& name) {
    for (auto& b : backends)
      if (b.name == name) return &b;
    return nullptr;
  }
  const BackendSpec& default_backend() const {
    for (const auto& b : backends)
      if (b.is_default) return b;
    throw UsageError("registry has no default backend");
  }
  void set_default(const std::string& name) {
    bool found = false;
    for (auto& b : backends) {
      b.is_default = b.name == name;
      found |= b.is_default;
    }
    if (!found) throw UsageError("cannot set unknown backend '" + name + "' as default");
  }
  void validate() const {
    int defaults = 0;
    std::set<std::string> names;
    for (const auto& b : backends) {
      if (!names.insert(b.name).second)
        throw UsageError("duplicate backend '" + b.name + "'");
      defaults += b.is_default ? 1 : 0;
      if (b.kind == BackendKind::SourceToSource) {
        const BackendSpec* down = find(b.downstream);
        if (!down || down->kind != BackendKind::Direct)
          throw UsageError("backend '" + b.name + "' needs a direct downstream backend");
      }
      if (b.kind != BackendKind::Mock) {
        for (const char* ph : {"{input}", "{output}", "{flags}"})
          if (b.command_template.find(ph) == std::string::npos)
            throw UsageError("backend '" + b.name + "' template lacks " + ph);
      }
    }
    if (defaults != 1)
      throw UsageError("registry must have exactly one default backend, found " +
                       std::to_string(defaults));
  }
};

// The six stock entries with their published flag rows. icc is the default;
// flags_parallel lists the full auto-parallel flag set (serial plus enabler),
// present only for the four backends that support it.
inline Registry default_registry() {
  Registry reg;
  auto add = [&](BackendSpec b) { reg.backends.push_back(std::move(b)); };
  {
    BackendSpec b;
    b.name = "clang";
    b.command_template = "clang {flags} -c {input} -o {output}";
    b.flags_serial = {"-Ofast", "-march=native"};
    b.flags_openmp = {"-fopenmp"};
    b.compat_group = "iomp";
    add(b);
  }
  {
    BackendSpec b;
    b.name = "gcc";
    b.command_template = "gcc {flags} -c {input} -o {output}";
    b.flags_serial = {"-Ofast", "-march=native"};
    b.flags_openmp = {"-fopenmp"};
    b.compat_group = "gomp";
    add(b);
  }
  {
    BackendSpec b;
    b.name = "icc";
    b.command_template = "icc {flags} -c {input} -o {output}";
    b.flags_serial = {"-Ofast", "-xHost"};
    b.flags_parallel = {"-Ofast", "-xHost", "-parallel"};
    b.flags_openmp = {"-qopenmp"};
    b.is_default = true;
    b.compat_group = "iomp";
    add(b);
  }
  {
    BackendSpec b;
    b.name = "pgcc";
    b.command_template = "pgcc {flags} -c {input} -o {output}";
    b.flags_serial = {"-fast", "-tp=skylake", "-Mllvm"};
    b.flags_parallel = {"-fast", "-tp=skylake", "-Mllvm", "-Mconcur"};
    b.flags_openmp = {"-mp"};
    b.compat_group = "pgi";
    add(b);
  }
  {
    BackendSpec b;
    b.name = "pluto";
    b.kind = BackendKind::SourceToSource;
    b.command_template = "polycc {input} {flags} -o {output}";
    b.flags_serial = {"--tile"};
    b.flags_parallel = {"--tile", "--parallel"};
    b.downstream = "icc";
    b.compat_group = "iomp";
    add(b);
  }
  {
    BackendSpec b;
    b.name = "polly";
    b.command_template = "clang {flags} -c {input} -o {output}";
    b.flags_serial = {"-O3", "-march=native", "-polly", "-polly-tiling",
                      "-polly-vectorizer=stripmine"};
    b.flags_parallel = {"-O3", "-march=native", "-polly", "-polly-tiling",
                        "-polly-vectorizer=stripmine", "-polly-parallel"};
    b.flags_openmp = {"-fopenmp"};
    b.compat_group = "iomp";
    add(b);
  }
  return reg;
}

// Config file: TSV rows `name kind command_template serial|parallel|openmp
// link_libs` extend/override the default registry. Directive lines:
//   @reset               drop the stock entries
//   @default <name>      set the default backend
//   @downstream <name> <backend>
//   @compat <name> <group>
//   @provider <template...>
//   @energy_tool <template...>
//   @energy_macro <define>
inline Registry load_backend_config(const fs::path& path) {
  Registry reg = default_registry();
  std::string text = read_file(path);
  fs::path base_dir = fs::absolute(path).parent_path();
  int line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    std::string line(trim(raw));
    if (line.empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& msg) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (line[0] == '@') {
      auto words = split_ws(line);
      const std::string& d = words[0];
      if (d == "@reset") {
        reg.backends.clear();
      } else if (d == "@default" && words.size() == 2) {
        reg.set_default(words[1]);
      } else if (d == "@downstream" && words.size() == 3) {
        BackendSpec* b = reg.find_mut(words[1]);
        if (!b) fail("unknown backend " + words[1]);
        b->downstream = words[2];
      } else if (d == "@compat" && words.size() == 3) {
        BackendSpec* b = reg.find_mut(words[1]);
        if (!b) fail("unknown backend " + words[1]);
        b->compat_group = words[2];
      } else if (d == "@provider" && words.size() >= 2) {
        reg.provider_template = trim(line.substr(d.size()));
      } else if (d == "@energy_tool" && words.size() >= 2) {
        reg.energy_tool_template = trim(line.substr(d.size()));
      } else if (d == "@energy_macro" && words.size() == 2) {
        reg.energy_macro = words[1];
      } else {
        fail("bad directive '" + line + "'");
      }
      continue;
    }
    auto cols = split(raw, '\t');
    if (cols.size() < 4) fail("expected at least 4 tab-separated columns");
    BackendSpec b;
    bool existed = false;
    if (BackendSpec* prev = reg.find_mut(trim(cols[0]))) {
      b = *prev;
      existed = true;
    }
    b.name = trim(cols[0]);
    b.kind = backend_kind_from(trim(cols[1]));
    b.command_template = trim(cols[2]);
    // mock profile paths are resolved relative to the config file
    if (b.kind == BackendKind::Mock && starts_with(b.command_template, "@")) {
      fs::path p = b.command_template.substr(1);
      if (p.is_relative()) b.command_template = "@" + (base_dir / p).string();
    }
    auto groups = split(cols[3], '|');
    b.flags_serial = groups.size() > 0 ? split_ws(groups[0]) : std::vector<std::string>{};
    b.flags_parallel = groups.size() > 1 ? split_ws(groups[1]) : std::vector<std::string>{};
    b.flags_openmp = groups.size() > 2 ? split_ws(groups[2]) : std::vector<std::string>{};
    b.link_libs = cols.size() > 4 ? split_ws(cols[4]) : std::vector<std::string>{};
    if (!existed) reg.backends.push_back(std::move(b));
    else *reg.find_mut(b.name) = b;
  }
  if (std::none_of(reg.backends.begin(), reg.backends.end(),
                   [](const BackendSpec& b) { return b.is_default; }) &&
      !reg.backends.empty())
    reg.backends.front().is_default = true;
  reg.validate();
  return reg;
}

}  // namespace mc
