#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "mc/fsutil.hpp"
#include "mc/process.hpp"

namespace mctest {

struct FakeCall {
  std::vector<std::string> argv;
  std::map<std::string, std::string> env;
};

// Scripted ProcessRunner. The default behavior models a cooperative
// toolchain: exit 0 and create the file named after "-o". A handler can
// replace that per test. Safe under the concurrent compile pool.
class FakeRunner : public mc::ProcessRunner {
public:
  using Handler = std::function<mc::RunResult(const FakeCall&)>;

  Handler handler;

  mc::RunResult run(const std::vector<std::string>& argv,
                    const std::map<std::string, std::string>& env = {}) override {
    FakeCall call{argv, env};
    {
      std::lock_guard<std::mutex> lock(mu_);
      calls_.push_back(call);
    }
    if (handler) return handler(call);
    return touch_output(call);
  }

  static mc::RunResult touch_output(const FakeCall& call) {
    for (size_t i = 0; i + 1 < call.argv.size(); ++i)
      if (call.argv[i] == "-o") mc::write_file(call.argv[i + 1], "fake-object\n");
    return {0, "", false};
  }

  std::vector<FakeCall> calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
  }

  size_t call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_.size();
  }

private:
  mutable std::mutex mu_;
  std::vector<FakeCall> calls_;
};

// Unique scratch directory, created on construction, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    path_ = mc::fs::temp_directory_path() /
            ("mctest_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    mc::fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    mc::fs::remove_all(path_, ec);
  }
  const mc::fs::path& path() const { return path_; }
  mc::fs::path file(const std::string& name) const { return path_ / name; }

private:
  mc::fs::path path_;
};

}  // namespace mctest
