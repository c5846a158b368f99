// Stand-in hardware-counter provider for tests and demos. Wraps one run of
// the target executable, reads the marker trace it leaves behind, and emits a
// counter CSV with values derived deterministically from region and event
// names, so downstream numbers are stable across hosts.

#include <cstdio>
#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/process.hpp"
#include "mc/strutil.hpp"

namespace {

constexpr int kEvents = 12;

uint64_t mix(const std::string& region, const std::string& event) {
  return mc::fnv1a64(region + "|" + event);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: mc_fake_provider <exe> <out_csv> [args...]\n");
    return 2;
  }
  std::string exe = argv[1];
  std::string out_csv = argv[2];
  std::string trace = out_csv + ".trace";
  mc::remove_if_exists(trace);

  std::vector<std::string> cmd{exe};
  for (int i = 3; i < argc; ++i) cmd.push_back(argv[i]);
  mc::RealProcessRunner runner;
  mc::RunResult res = runner.run(cmd, {{"MC_MARKER_TRACE", trace}});
  if (res.spawn_failed || res.exit_code != 0) {
    std::fprintf(stderr, "mc_fake_provider: target run failed: %s\n",
                 res.output.c_str());
    return 1;
  }

  std::vector<std::string> regions;
  if (mc::fs::exists(trace)) {
    for (const auto& line : mc::split_lines(mc::read_file(trace))) {
      auto cols = mc::split(line, '\t');
      if (cols.size() == 2 && cols[0] == "START") {
        bool seen = false;
        for (const auto& r : regions) seen = seen || r == cols[1];
        if (!seen) regions.push_back(cols[1]);
      }
    }
  }

  std::string csv = "loop_id,event,count\n";
  for (const auto& r : regions) {
    for (int e = 0; e < kEvents; ++e) {
      std::string ev = "ev" + std::to_string(e);
      csv += r + "," + ev + "," + std::to_string(1000 + mix(r, ev) % 9000) + "\n";
    }
    csv += r + ",inst_retired," +
           std::to_string(1000000 + mix(r, "inst_retired") % 9000000) + "\n";
  }
  mc::write_file(out_csv, csv);
  return 0;
}
