#pragma once

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/strutil.hpp"

extern char** environ;

namespace mc {

struct RunResult {
  int exit_code = -1;
  std::string output;       // combined stdout+stderr
  bool spawn_failed = false;  // binary missing / not executable
};

// Interface so tests can substitute scripted runners.
class ProcessRunner {
public:
  virtual ~ProcessRunner() = default;
  virtual RunResult run(const std::vector<std::string>& argv,
                        const std::map<std::string, std::string>& env = {}) = 0;
};

// posix_spawn-based runner; safe for concurrent calls (each call owns a
// private temp file for output capture).
class RealProcessRunner : public ProcessRunner {
public:
  RunResult run(const std::vector<std::string>& argv,
                const std::map<std::string, std::string>& env = {}) override {
    RunResult res;
    if (argv.empty()) {
      res.spawn_failed = true;
      return res;
    }
    std::string tmpl = (fs::temp_directory_path() / "mc_out_XXXXXX").string();
    std::vector<char> tmp(tmpl.begin(), tmpl.end());
    tmp.push_back('\0');
    int out_fd = mkstemp(tmp.data());
    if (out_fd < 0) throw IoError("mkstemp failed: " + std::string(strerror(errno)));
    std::string out_path(tmp.data());

    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    // environment = current + overrides
    std::vector<std::string> env_store;
    std::vector<char*> cenv;
    for (char** e = environ; *e; ++e) {
      std::string_view entry(*e);
      auto eq = entry.find('=');
      std::string key(entry.substr(0, eq == std::string_view::npos ? entry.size() : eq));
      if (env.count(key)) continue;
      cenv.push_back(*e);
    }
    for (const auto& [k, v] : env) env_store.push_back(k + "=" + v);
    for (auto& s : env_store) cenv.push_back(s.data());
    cenv.push_back(nullptr);

    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, out_fd, 1);
    posix_spawn_file_actions_adddup2(&fa, out_fd, 2);
    posix_spawn_file_actions_addopen(&fa, 0, "/dev/null", O_RDONLY, 0);

    pid_t pid = -1;
    int rc = posix_spawnp(&pid, cargv[0], &fa, nullptr, cargv.data(), cenv.data());
    posix_spawn_file_actions_destroy(&fa);
    close(out_fd);
    if (rc != 0) {
      res.spawn_failed = true;
      res.output = std::string("spawn failed: ") + strerror(rc);
      fs::remove(out_path);
      return res;
    }
    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status))
      res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
      res.exit_code = 128 + WTERMSIG(status);
    res.output = read_file(out_path);
    fs::remove(out_path);
    return res;
  }
};

// Renders a command template into argv. Placeholders ({input}, {output},
// {flags}, {exe}, {args}, {out}, {out_csv}) may expand to several argv
// entries; substitution never re-splits substituted values except the
// multi-valued `lists` entries, which contribute one argv element per item.
inline std::vector<std::string> render_template(
    const std::string& command_template,
    const std::map<std::string, std::string>& single,
    const std::map<std::string, std::vector<std::string>>& lists = {}) {
  std::vector<std::string> argv;
  for (const auto& word : split_ws(command_template)) {
    bool expanded = false;
    for (const auto& [key, values] : lists) {
      if (word == "{" + key + "}") {
        for (const auto& v : values) argv.push_back(v);
        expanded = true;
        break;
      }
    }
    if (expanded) continue;
    std::string w = word;
    for (const auto& [key, value] : single) {
      std::string ph = "{" + key + "}";
      size_t pos;
      while ((pos = w.find(ph)) != std::string::npos)
        w = w.substr(0, pos) + value + w.substr(pos + ph.size());
    }
    argv.push_back(w);
  }
  return argv;
}

}  // namespace mc
