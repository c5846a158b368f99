#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "mc/pipeline.hpp"
#include "test_support.hpp"

using namespace mc;
using doctest::Contains;

namespace {

const char* kTriSource =
    "#define N 32\n"
    "\n"
    "double xa[N], xb[N], xc[N];\n"
    "\n"
    "void fa(void) {\n"
    "  for (int i = 0; i < N; i++)\n"
    "    xa[i] = (double)i;\n"
    "}\n"
    "\n"
    "void fb(void) {\n"
    "  for (int i = 0; i < N; i++)\n"
    "    xb[i] = xa[i] + 1.0;\n"
    "}\n"
    "\n"
    "void fc(void) {\n"
    "  for (int i = 0; i < N; i++)\n"
    "    xc[i] = xa[i] * xb[i];\n"
    "}\n"
    "\n"
    "int main(void) {\n"
    "  fa();\n"
    "  fb();\n"
    "  fc();\n"
    "  return (int)xc[3];\n"
    "}\n";

void write_script(const fs::path& path, const std::string& body) {
  write_file(path, body);
  fs::permissions(path, fs::perms::owner_all | fs::perms::group_read |
                            fs::perms::others_read);
}

}  // namespace

TEST_CASE("parse_args maps every flag onto the run config") {
  RunConfig c = parse_args({"app.c", "util.c", "-o", "out", "--runs", "5", "-j", "4",
                            "--seed", "7", "--trees", "50", "--input", "a b",
                            "--backend-config", "cfg.tsv", "--workdir", "wd",
                            "--min-loop-lines", "2", "-I", "inc", "-DFOO=1", "-L",
                            "lib", "-lm", "--openmp"});
  CHECK(c.sources == std::vector<std::string>{"app.c", "util.c"});
  CHECK(c.output_path == "out");
  CHECK(c.runs == 5);
  CHECK(c.pool_size == 4);
  CHECK(c.seed == 7);
  CHECK(c.n_trees == 50);
  CHECK(c.input_args_text == "a b");
  CHECK(c.backend_config == "cfg.tsv");
  CHECK(c.workdir == "wd");
  CHECK(c.min_loop_lines == 2);
  CHECK(c.compile_flags == std::vector<std::string>{"-Iinc", "-DFOO=1"});
  CHECK(c.link_flags == std::vector<std::string>{"-Llib", "-lm"});
  CHECK(c.openmp);
  CHECK_FALSE(c.parallel);
  CHECK_FALSE(c.compile_only);
  CHECK(c.train_csv.empty());
}

TEST_CASE("parse_args defaults") {
  RunConfig c = parse_args({"x.c"});
  CHECK(c.runs == 3);
  CHECK(c.pool_size == 0);
  CHECK(c.seed == 42);
  CHECK(c.n_trees == 100);
  CHECK(c.train_mode == "serial");
  CHECK(c.min_loop_lines == 0);
  CHECK(c.output_path.empty());
  CHECK_FALSE(c.predict);
  CHECK_FALSE(c.power_profile);
  CHECK_FALSE(c.advanced_profile_only);
}

TEST_CASE("parse_args mode flags") {
  CHECK(parse_args({"x.c", "-c"}).compile_only);
  CHECK(parse_args({"x.c", "--predict", "--model", "m.bin"}).predict);
  CHECK(parse_args({"x.c", "--predict", "--model", "m.bin"}).model_path == "m.bin");
  CHECK(parse_args({"x.c", "--power-profile"}).power_profile);
  CHECK(parse_args({"x.c", "--advanced-profile-only"}).advanced_profile_only);
  CHECK(parse_args({"x.c", "--parallel"}).parallel);
  CHECK(parse_args({"--train", "d.csv"}).train_csv == "d.csv");
  CHECK(parse_args({"--train", "d.csv", "--mode", "parallel"}).train_mode ==
        "parallel");
  CHECK(parse_args({"a.manifest", "b.manifest"}).sources.size() == 2);
  // -c with -o is fine for a single source
  CHECK(parse_args({"x.c", "-c", "-o", "x.manifest"}).compile_only);
}

TEST_CASE("parse_args rejects conflicting or malformed invocations") {
  CHECK_THROWS_WITH_AS(parse_args({"--train", "d.csv", "app.c"}),
                       Contains("combined"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"--train", "d.csv", "--predict", "--model", "m"}),
                       Contains("combined"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "--parallel", "--openmp"}),
                       Contains("mutually exclusive"), UsageError);
  CHECK_THROWS_WITH_AS(
      parse_args({"x.c", "--predict", "--model", "m", "--power-profile"}),
      Contains("mutually exclusive"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "-c", "--predict", "--model", "m"}),
                       Contains("link step"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "--predict"}), Contains("--model"),
                       UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "--runs", "0"}), Contains(">= 1"),
                       UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "--runs", "abc"}), Contains("integer"),
                       UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "--runs", "-3"}), Contains("integer"),
                       UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"--train", "d.csv", "--mode", "weird"}),
                       Contains("serial"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({}), Contains("no input files"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "a.manifest"}), Contains("mix"),
                       UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"a.manifest", "-c"}), Contains("source files"),
                       UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "y.c", "-c", "-o", "out"}),
                       Contains("single source"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "--frobnicate"}),
                       Contains("unknown option '--frobnicate'"), UsageError);
  CHECK_THROWS_WITH_AS(parse_args({"x.c", "-o"}), Contains("requires a value"),
                       UsageError);
}

TEST_CASE("run_cli handles help and usage errors without running anything") {
  mctest::FakeRunner runner;
  CHECK(run_cli({"--help"}, runner) == 0);
  CHECK(run_cli({"-h"}, runner) == 0);
  CHECK(run_cli({}, runner) == 2);
  CHECK(run_cli({"x.c", "--parallel", "--openmp"}, runner) == 2);
  CHECK(runner.call_count() == 0);
}

TEST_CASE("duplicate source stems are rejected before compilation") {
  mctest::TempDir tmp("dupstem");
  ensure_dir(tmp.path() / "a");
  ensure_dir(tmp.path() / "b");
  write_file(tmp.path() / "a" / "x.c", "int main(void) { return 0; }\n");
  write_file(tmp.path() / "b" / "x.c", "int main(void) { return 0; }\n");
  mctest::FakeRunner runner;
  int rc = run_cli({(tmp.path() / "a" / "x.c").string(),
                    (tmp.path() / "b" / "x.c").string(), "--workdir",
                    (tmp.path() / "wd").string()},
                   runner);
  CHECK(rc == 2);
  CHECK(runner.call_count() == 0);
}

TEST_CASE("profile-guided search reproduces the golden selection") {
  mctest::TempDir tmp("search");
  RealProcessRunner runner;
  std::string fix = MC_FIXTURE_DIR "/accept4";
  std::string out = (tmp.path() / "app").string();
  std::string wd = (tmp.path() / "wd").string();
  Diag::global().clear();
  int rc = run_cli({fix + "/five.c", "-o", out, "--backend-config",
                    fix + "/backends.tsv", "--workdir", wd, "--runs", "3", "-j", "4"},
                   runner);
  REQUIRE(rc == 0);
  CHECK(read_file(fs::path(wd) / "report" / "selection.csv") ==
        read_file(fix + "/selection.golden.csv"));
  CHECK(fs::exists(fs::path(wd) / "report" / "timing.csv"));
  CHECK(fs::exists(fs::path(wd) / "src" / "five_fa_L0.clean.c"));
  REQUIRE(fs::exists(out));

  // the composed executable reports the chosen variant of every loop
  auto frag = run_profiled(out, {}, 1, runner, tmp.path(), "composed");
  REQUIRE(frag.size() == 5);
  uint64_t sum = 0;
  for (const auto& [loop, totals] : frag) {
    REQUIRE(totals.size() == 1);
    sum += totals[0];
  }
  CHECK(sum == 11800);  // per-loop minima: 1000+2500+1500+800+6000
  Diag::global().clear();
}

TEST_CASE("compile-only emits a manifest that a later invocation links") {
  mctest::TempDir tmp("manifest");
  RealProcessRunner runner;
  std::string fix = MC_FIXTURE_DIR "/accept4";
  std::string manifest = (tmp.path() / "five.manifest").string();
  Diag::global().clear();
  int rc = run_cli({fix + "/five.c", "-c", "-o", manifest, "--backend-config",
                    fix + "/backends.tsv", "--workdir", (tmp.path() / "wd1").string(),
                    "-j", "4"},
                   runner);
  REQUIRE(rc == 0);

  auto rows = parse_manifest(read_file(manifest));
  CHECK(rows.size() == 31);  // 5 loops x 3 backends x {timed,clean} + 1 base
  int bases = 0, timed = 0, clean = 0;
  for (const auto& r : rows) {
    if (r.variant == "base") {
      ++bases;
      CHECK(r.loop_id == "base:five");
      CHECK(r.backend == "bA");
    } else if (r.variant == "timed") {
      ++timed;
    } else if (r.variant == "clean") {
      ++clean;
    }
    CHECK(fs::exists(r.object_path));
  }
  CHECK(bases == 1);
  CHECK(timed == 15);
  CHECK(clean == 15);

  std::string out = (tmp.path() / "app").string();
  std::string wd2 = (tmp.path() / "wd2").string();
  rc = run_cli({manifest, "-o", out, "--backend-config", fix + "/backends.tsv",
                "--workdir", wd2},
               runner);
  REQUIRE(rc == 0);
  CHECK(read_file(fs::path(wd2) / "report" / "selection.csv") ==
        read_file(fix + "/selection.golden.csv"));
  CHECK(fs::exists(out));
  Diag::global().clear();
}

TEST_CASE("prediction mode selects from counters and falls back by default") {
  mctest::TempDir tmp("predict");
  RealProcessRunner runner;
  write_file(tmp.file("tri.c"), kTriSource);
  write_file(tmp.file("spec.tsv"), "");

  write_script(tmp.file("prov.sh"),
               "#!/bin/sh\n"
               "cat > \"$2\" <<'EOF'\n"
               "loop_id,event,count\n"
               "tri_fa_L0,inst_retired,1000\n"
               "tri_fa_L0,ev0,1\n"
               "tri_fa_L0,ev1,5\n"
               "tri_fb_L1,inst_retired,1000\n"
               "tri_fb_L1,ev0,2000000\n"
               "tri_fb_L1,ev1,5\n"
               "EOF\n");

  write_file(tmp.file("backends.tsv"),
             "@reset\n"
             "gcc\tmock\t@spec.tsv\t-O2\t\n"
             "icc\tmock\t@spec.tsv\t-O2\t\n"
             "polly\tmock\t@spec.tsv\t-O2\t\n"
             "@default icc\n"
             "@provider " +
                 tmp.file("prov.sh").string() + " {exe} {out_csv}\n");

  // single decision stump: pki(ev0) <= 1.5 -> gcc, else polly
  std::string body =
      "MCMODEL 1\n"
      "mode serial\n"
      "schema ev0,ev1\n"
      "classes gcc,polly\n"
      "params n_trees=1 max_depth=25 min_samples_leaf=5 feature_subset_size=2 "
      "max_categories=15 seed=42 oob=0.5\n"
      "N 0 1.5\n"
      "L 0\n"
      "L 1\n";
  write_file(tmp.file("model.bin"), body + "checksum " + to_hex(fnv1a64(body)) + "\n");

  std::string out = (tmp.path() / "app").string();
  std::string wd = (tmp.path() / "wd").string();
  Diag::global().clear();
  int rc = run_cli({tmp.file("tri.c").string(), "--predict", "--model",
                    tmp.file("model.bin").string(), "--backend-config",
                    tmp.file("backends.tsv").string(), "-o", out, "--workdir", wd},
                   runner);
  REQUIRE(rc == 0);
  CHECK(read_file(fs::path(wd) / "report" / "selection.csv") ==
        "loop_id,chosen_backend,reason\n"
        "tri_fa_L0,gcc,predicted\n"
        "tri_fb_L1,polly,predicted\n"
        "tri_fc_L2,icc,default_fallback\n");
  CHECK(fs::exists(out));

  // a model trained for the other mode is refused up front
  rc = run_cli({tmp.file("tri.c").string(), "--predict", "--parallel", "--model",
                tmp.file("model.bin").string(), "--backend-config",
                tmp.file("backends.tsv").string(), "-o", out, "--workdir",
                (tmp.path() / "wd_par").string()},
               runner);
  CHECK(rc == 2);
  Diag::global().clear();
}

TEST_CASE("counter collection mode writes the interchange CSV") {
  mctest::TempDir tmp("counters");
  RealProcessRunner runner;
  write_file(tmp.file("tri.c"), kTriSource);
  write_file(tmp.file("spec.tsv"), "");
  write_script(tmp.file("prov.sh"),
               "#!/bin/sh\n"
               "cat > \"$2\" <<'EOF'\n"
               "loop_id,event,count\n"
               "tri_fa_L0,instructions,1000\n"
               "tri_fa_L0,cycles,70\n"
               "EOF\n");
  write_file(tmp.file("backends.tsv"),
             "@reset\n"
             "icc\tmock\t@spec.tsv\t-O2\t\n"
             "@default icc\n"
             "@provider " +
                 tmp.file("prov.sh").string() + " {exe} {out_csv}\n");

  std::string out = (tmp.path() / "counters.csv").string();
  Diag::global().clear();
  int rc = run_cli({tmp.file("tri.c").string(), "--advanced-profile-only",
                    "--backend-config", tmp.file("backends.tsv").string(), "-o", out,
                    "--workdir", (tmp.path() / "wd").string()},
                   runner);
  REQUIRE(rc == 0);
  std::string csv = read_file(out);
  CHECK(csv.substr(0, 20) == "loop_id,event,count\n");
  CHECK(csv.find("tri_fa_L0,cycles,70") != std::string::npos);
  Diag::global().clear();
}

TEST_CASE("power-profile mode reports per-loop energy for every backend") {
  mctest::TempDir tmp("power");
  RealProcessRunner runner;
  write_file(tmp.file("tri.c"), kTriSource);
  write_file(tmp.file("spec.tsv"), "");
  write_script(tmp.file("etool.sh"),
               "#!/bin/sh\n"
               "cat > \"$2\" <<'EOF'\n"
               "Region tri_fa_L0, Group 1: ENERGY\n"
               "| Runtime (RDTSC) [s] | 2 |\n"
               "| Energy [J] | 30 |\n"
               "| Energy DRAM [J] | 10 |\n"
               "Region tri_fb_L1, Group 1: ENERGY\n"
               "| Runtime (RDTSC) [s] | 2 |\n"
               "| Energy [J] | 30 |\n"
               "| Energy DRAM [J] | 10 |\n"
               "Region tri_fc_L2, Group 1: ENERGY\n"
               "| Runtime (RDTSC) [s] | 2 |\n"
               "| Energy [J] | 30 |\n"
               "| Energy DRAM [J] | 10 |\n"
               "EOF\n");
  write_file(tmp.file("backends.tsv"),
             "@reset\n"
             "eA\tmock\t@spec.tsv\t-O2\t\n"
             "eB\tmock\t@spec.tsv\t-O2\t\n"
             "@default eA\n"
             "@energy_tool " +
                 tmp.file("etool.sh").string() + " {exe} {out}\n");

  std::string out = (tmp.path() / "energy.csv").string();
  Diag::global().clear();
  int rc = run_cli({tmp.file("tri.c").string(), "--power-profile",
                    "--backend-config", tmp.file("backends.tsv").string(), "-o", out,
                    "--workdir", (tmp.path() / "wd").string()},
                   runner);
  REQUIRE(rc == 0);
  CHECK(read_file(out) ==
        "loop_id,backend,pkg_energy_J,dram_energy_J,elapsed_s,avg_power_W\n"
        "tri_fa_L0,eA,30,10,2,20\n"
        "tri_fa_L0,eB,30,10,2,20\n"
        "tri_fb_L1,eA,30,10,2,20\n"
        "tri_fb_L1,eB,30,10,2,20\n"
        "tri_fc_L2,eA,30,10,2,20\n"
        "tri_fc_L2,eB,30,10,2,20\n");
  Diag::global().clear();
}

TEST_CASE("train mode writes a loadable model") {
  mctest::TempDir tmp("train");
  mctest::FakeRunner runner;
  std::string out = (tmp.path() / "m.bin").string();
  int rc = run_cli({"--train", MC_FIXTURE_DIR "/synth_train.csv", "-o", out,
                    "--trees", "12", "--seed", "9"},
                   runner);
  REQUIRE(rc == 0);
  ForestModel m = load_model(out);
  CHECK(m.mode == "serial");
  CHECK(m.trees.size() == 12);
  CHECK(m.params.seed == 9);
  CHECK(m.oob_accuracy > 0.6);
  CHECK(runner.call_count() == 0);
}
