// Stand-in energy meter for tests and demos. Runs the target executable once,
// recovers its marker regions, and prints a report in the table format the
// energy parser consumes. Numbers are derived from the executable's basename
// and the region name, so each backend variant gets distinct, stable values
// and elapsed time is never zero.

#include <cstdio>
#include <string>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/process.hpp"
#include "mc/strutil.hpp"

namespace {

double scaled(const std::string& salt, const std::string& region,
              const std::string& metric, double lo, double hi) {
  uint64_t h = mc::fnv1a64(salt + "|" + region + "|" + metric);
  double unit = static_cast<double>(h % 10000) / 10000.0;
  return lo + unit * (hi - lo);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: mc_fake_energy_tool <exe> <outfile> [args...]\n");
    return 2;
  }
  std::string exe = argv[1];
  std::string outfile = argv[2];
  std::string trace = outfile + ".trace";
  mc::remove_if_exists(trace);

  std::vector<std::string> cmd{exe};
  for (int i = 3; i < argc; ++i) cmd.push_back(argv[i]);
  mc::RealProcessRunner runner;
  mc::RunResult res = runner.run(cmd, {{"MC_MARKER_TRACE", trace}});
  if (res.spawn_failed || res.exit_code != 0) {
    std::fprintf(stderr, "mc_fake_energy_tool: target run failed: %s\n",
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

  std::string salt = mc::fs::path(exe).filename().string();
  std::string report;
  for (const auto& r : regions) {
    report += "Region " + r + ", Group 1: ENERGY\n";
    report += "+---------------------+------------+\n";
    report += "| Runtime (RDTSC) [s] | " +
              mc::format_double(scaled(salt, r, "elapsed", 0.5, 2.5)) + " |\n";
    report += "| Energy [J] | " +
              mc::format_double(scaled(salt, r, "pkg", 5.0, 50.0)) + " |\n";
    report += "| Energy DRAM [J] | " +
              mc::format_double(scaled(salt, r, "dram", 1.0, 10.0)) + " |\n";
    report += "\n";
  }
  mc::write_file(outfile, report);
  return 0;
}
