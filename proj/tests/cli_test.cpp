// Drives the installed CLI binary end to end.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifdef MMUSIM_TOOL_PATH

namespace {

int run_tool(const std::string& args) {
  const std::string cmd = std::string(MMUSIM_TOOL_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

}  // namespace

TEST_CASE("cli exit codes") {
  CHECK(run_tool("--help") == 0);

  write_file("/tmp/mmusim_bad.cfg", "no.such.key = 1\n");
  CHECK(run_tool("--config /tmp/mmusim_bad.cfg") == 1);

  CHECK(run_tool("--trace /tmp/does_not_exist.trace") == 2);

  write_file("/tmp/mmusim_bad.trace", "A 1 Q R 0\n");
  CHECK(run_tool("--trace /tmp/mmusim_bad.trace --out /tmp/mmusim_bad_out") ==
        2);
}

TEST_CASE("cli single run writes the three report files") {
  const int rc = run_tool(
      "--max-events 20000 --seed 5 --out /tmp/mmusim_single");
  CHECK(rc == 0);
  const std::string summary = slurp("/tmp/mmusim_single/summary.txt");
  CHECK(summary.find("est_ipc") != std::string::npos);
  CHECK(summary.find("config.synth.seed = 5") != std::string::npos);
  CHECK(!slurp("/tmp/mmusim_single/walk_latency_hist.csv").empty());
  CHECK(!slurp("/tmp/mmusim_single/walk_locality.csv").empty());
}

TEST_CASE("cli trace run consumes the documented grammar") {
  write_file("/tmp/mmusim_ok.trace",
             "# tiny trace\n"
             "A 0 D R 1000\n"
             "A 0 D W 1040\n"
             "S 0 3\n"
             "A 0 I R 400000\n");
  const int rc =
      run_tool("--trace /tmp/mmusim_ok.trace --out /tmp/mmusim_trace_out");
  CHECK(rc == 0);
  const std::string summary = slurp("/tmp/mmusim_trace_out/summary.txt");
  CHECK(summary.find("events = 4") != std::string::npos);
  CHECK(summary.find("context_switches = 1") != std::string::npos);
}

TEST_CASE("cli sweep reruns produce byte-identical CSVs") {
  write_file("/tmp/mmusim_sweep.cfg",
             "sweep.l4.sizes = 4MiB,8MiB\n"
             "sweep.l4.blocks = 64\n"
             "synth.footprint = 4MiB\n"
             "engine.max_events = 10000\n");
  CHECK(run_tool("--config /tmp/mmusim_sweep.cfg --sweep --jobs 2 "
                 "--out /tmp/mmusim_sweep1") == 0);
  CHECK(run_tool("--config /tmp/mmusim_sweep.cfg --sweep --jobs 1 "
                 "--out /tmp/mmusim_sweep2") == 0);
  const std::string a = slurp("/tmp/mmusim_sweep1/sweep.csv");
  const std::string b = slurp("/tmp/mmusim_sweep2/sweep.csv");
  CHECK(!a.empty());
  CHECK(a == b);
  // 4 points: header + 4 rows.
  CHECK(a.rfind("l4_size,l4_block,ideal_tlb,", 0) == 0);
}

TEST_CASE("MMU_SIM_SEED is the seed fallback") {
  const std::string cmd =
      std::string("MMU_SIM_SEED=77 ") + MMUSIM_TOOL_PATH +
      " --max-events 1000 --out /tmp/mmusim_envseed > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const std::string summary = slurp("/tmp/mmusim_envseed/summary.txt");
  CHECK(summary.find("config.synth.seed = 77") != std::string::npos);
}

#endif  // MMUSIM_TOOL_PATH
