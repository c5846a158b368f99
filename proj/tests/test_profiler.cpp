#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mc/profiler.hpp"
#include "test_support.hpp"

using namespace mc;
using mctest::FakeRunner;
using mctest::TempDir;

TEST_CASE("parse_profile_records sums repeated loops and skips junk") {
  Diag::global().clear();
  std::string text =
      "MC\tgemm_L0\t100\n"
      "MC\tinit_L1\t40\n"
      "MC\tgemm_L0\t250\n"
      "noise line\n"
      "MC\tgemm_L0\n"            // missing column
      "MC\t\t77\n"               // empty loop id
      "MC\tbad_L2\tnotanumber\n"
      "\n"
      "MC\tinit_L1\t2\n";
  auto totals = parse_profile_records(text);
  REQUIRE(totals.size() == 2);
  CHECK(totals["gemm_L0"] == 350);
  CHECK(totals["init_L1"] == 42);
  CHECK(Diag::global().count() == 4);
  Diag::global().clear();
}

TEST_CASE("parse_profile_records is order independent") {
  auto a = parse_profile_records("MC\tx\t1\nMC\ty\t5\nMC\tx\t2\n");
  auto b = parse_profile_records("MC\tx\t2\nMC\tx\t1\nMC\ty\t5\n");
  CHECK(a == b);
}

TEST_CASE("median is the lower-middle observed sample") {
  CHECK(median_ns({7}) == 7);
  CHECK(median_ns({3, 9}) == 3);
  CHECK(median_ns({9, 3}) == 3);
  CHECK(median_ns({5, 1, 9}) == 5);
  CHECK(median_ns({4, 2, 8, 6}) == 4);
  CHECK(median_ns({10, 10, 10, 10, 10}) == 10);
  CHECK_THROWS_AS(median_ns({}), EmptySamples);

  // property: equals the sorted lower middle, and is an element of the input
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    size_t n = 1 + rng() % 9;
    std::vector<uint64_t> v;
    for (size_t i = 0; i < n; ++i) v.push_back(rng() % 1000);
    uint64_t got = median_ns(v);
    std::vector<uint64_t> s = v;
    std::sort(s.begin(), s.end());
    CHECK(got == s[(n - 1) / 2]);
    CHECK(std::count(v.begin(), v.end(), got) > 0);
  }
}

TEST_CASE("run_profiled launches N sequential runs with fresh report files") {
  TempDir td("prof");
  FakeRunner runner;
  std::vector<std::string> seen_reports;
  runner.handler = [&](const mctest::FakeCall& call) {
    REQUIRE(call.env.count("MC_PROFILE_OUT"));
    std::string report = call.env.at("MC_PROFILE_OUT");
    seen_reports.push_back(report);
    CHECK(!fs::exists(report));  // stale files are cleared before each run
    // two loops, timings vary per run
    uint64_t base = 100 * (seen_reports.size());
    write_file(report, "MC\tl0\t" + std::to_string(base) + "\nMC\tl1\t" +
                           std::to_string(base + 5) + "\n");
    return RunResult{0, "", false};
  };

  auto frag = run_profiled("/fake/exe", {"arg1", "arg2"}, 3, runner, td.path(), "icc");
  REQUIRE(runner.call_count() == 3);
  CHECK(runner.calls()[0].argv ==
        std::vector<std::string>{"/fake/exe", "arg1", "arg2"});
  REQUIRE(seen_reports.size() == 3);
  CHECK(seen_reports[0] != seen_reports[1]);  // per-run report files
  CHECK(seen_reports[0].find("icc.r0") != std::string::npos);
  REQUIRE(frag.count("l0"));
  CHECK(frag["l0"] == std::vector<uint64_t>{100, 200, 300});
  CHECK(frag["l1"] == std::vector<uint64_t>{105, 205, 305});
}

TEST_CASE("run_profiled propagates failures") {
  TempDir td("proffail");
  FakeRunner runner;
  runner.handler = [](const mctest::FakeCall&) { return RunResult{3, "boom", false}; };
  CHECK_THROWS_AS(run_profiled("/fake/exe", {}, 2, runner, td.path(), "t"),
                  RunFailed);

  runner.handler = [](const mctest::FakeCall&) { return RunResult{-1, "", true}; };
  CHECK_THROWS_AS(run_profiled("/fake/exe", {}, 1, runner, td.path(), "t"),
                  RunFailed);

  CHECK_THROWS_AS(run_profiled("/fake/exe", {}, 0, runner, td.path(), "t"),
                  UsageError);
}

TEST_CASE("a run that records nothing contributes no samples") {
  TempDir td("profempty");
  FakeRunner runner;
  int n = 0;
  runner.handler = [&](const mctest::FakeCall& call) {
    // only the second run writes a report
    if (++n == 2) write_file(call.env.at("MC_PROFILE_OUT"), "MC\tl0\t50\n");
    return RunResult{0, "", false};
  };
  auto frag = run_profiled("/fake/exe", {}, 3, runner, td.path(), "t");
  REQUIRE(frag.count("l0"));
  CHECK(frag["l0"] == std::vector<uint64_t>{50});
}

TEST_CASE("TimingTable accumulates and enumerates") {
  TimingTable t;
  t.add("l0", "gcc", 10);
  t.add("l0", "gcc", 12);
  t.add("l0", "icc", 9);
  t.add("l1", "gcc", 100);
  REQUIRE(t.find("l0", "gcc") != nullptr);
  CHECK(*t.find("l0", "gcc") == std::vector<uint64_t>{10, 12});
  CHECK(t.find("l2", "gcc") == nullptr);
  CHECK(t.loops() == std::set<std::string>{"l0", "l1"});
  CHECK(t.backends() == std::set<std::string>{"gcc", "icc"});
}

TEST_CASE("parse_counter_csv requires the exact header") {
  CHECK_THROWS_AS(parse_counter_csv(""), IoError);
  CHECK_THROWS_AS(parse_counter_csv("loop,event,count\nx,e,1\n"), IoError);
  CHECK_NOTHROW(parse_counter_csv("\n\nloop_id,event,count\n"));
}

TEST_CASE("parse_counter_csv groups rows and captures instructions") {
  Diag::global().clear();
  std::string text =
      "loop_id,event,count\n"
      "lB,cycles,200\n"
      "lB,inst_retired,1000\n"
      "lA,cycles,300\n"
      "lB,cache_misses,7\n"
      "broken row without commas\n"
      "lA,inst_retired,not_a_number\n";
  auto sets = parse_counter_csv(text);
  REQUIRE(sets.size() == 2);
  // first-appearance order, not alphabetical
  CHECK(sets[0].loop_id == "lB");
  CHECK(sets[1].loop_id == "lA");
  CHECK(sets[0].instructions == doctest::Approx(1000));
  CHECK(sets[0].counters.at("cycles") == doctest::Approx(200));
  CHECK(sets[0].counters.at("cache_misses") == doctest::Approx(7));
  CHECK(sets[0].counters.count("inst_retired") == 0);  // reserved name
  CHECK(sets[1].instructions == doctest::Approx(0));
  CHECK(Diag::global().count() == 2);
  Diag::global().clear();
}

TEST_CASE("collect_counters wraps the run in the provider command") {
  TempDir td("prov");
  FakeRunner runner;
  runner.handler = [&](const mctest::FakeCall& call) {
    // provider argv: prov <exe> <csv> <args...>
    write_file(call.argv[2], "loop_id,event,count\nl0,cycles,5\nl0,inst_retired,50\n");
    return RunResult{0, "", false};
  };
  auto sets = collect_counters("prov {exe} {out_csv} {args}", "/fake/exe",
                               {"10", "20"}, td.file("c.csv"), runner);
  REQUIRE(runner.call_count() == 1);
  CHECK(runner.calls()[0].argv ==
        std::vector<std::string>{"prov", "/fake/exe", td.file("c.csv").string(),
                                 "10", "20"});
  REQUIRE(sets.size() == 1);
  CHECK(sets[0].instructions == doctest::Approx(50));
}

TEST_CASE("collect_counters failure paths all carry guidance") {
  TempDir td("provfail");
  FakeRunner runner;
  const std::string exe = "/fake/exe";
  const auto csv = td.file("c.csv");

  // 1: no provider configured
  CHECK_THROWS_WITH_AS(collect_counters("", exe, {}, csv, runner),
                       doctest::Contains("@provider"), ProviderUnavailable);

  // 2: provider binary missing
  runner.handler = [](const mctest::FakeCall&) { return RunResult{-1, "no prov", true}; };
  CHECK_THROWS_AS(collect_counters("prov {exe} {out_csv} {args}", exe, {}, csv, runner),
                  ProviderUnavailable);

  // 3: provider exits nonzero
  runner.handler = [](const mctest::FakeCall&) { return RunResult{2, "denied", false}; };
  CHECK_THROWS_WITH_AS(collect_counters("prov {exe} {out_csv} {args}", exe, {}, csv, runner),
                       doctest::Contains("exited 2"), ProviderUnavailable);

  // 4: provider exits clean but writes nothing
  runner.handler = [](const mctest::FakeCall&) { return RunResult{0, "", false}; };
  CHECK_THROWS_WITH_AS(collect_counters("prov {exe} {out_csv} {args}", exe, {}, csv, runner),
                       doctest::Contains("no CSV"), ProviderUnavailable);
}
