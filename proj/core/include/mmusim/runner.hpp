#pragma once

#include <string>
#include <vector>

#include "mmusim/config.hpp"
#include "mmusim/report.hpp"

namespace mmusim {

// Executes one experiment to completion and returns its report (with the
// resolved config echoed into it).
Report run_single(const ExperimentConfig& cfg);

struct SweepRow {
  std::uint64_t l4_size = 0;
  std::uint32_t l4_block = 0;
  bool ideal_tlb = false;
  double l4_hit_rate = 0.0;
  double l4hit_tlbmiss_per_1k = 0.0;
  double avg_walk_cycles = 0.0;
  double est_ipc = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;      // ordered by experiment index
  std::vector<Report> reports;     // same order
  std::string csv;                 // combined table
};

// Cross product of sweep.l4_sizes x sweep.l4_blocks x sweep.ideal_modes,
// each point over the identical event stream. `jobs` bounds the worker
// threads; results are ordered by experiment index regardless of
// completion order.
SweepResult run_sweep(const ExperimentConfig& cfg, unsigned jobs = 1);

std::string sweep_csv_header();

// Writes summary.txt, walk_latency_hist.csv and walk_locality.csv under
// `dir` (created if missing); returns the paths written.
std::vector<std::string> emit_report(const Report& report,
                                     const std::string& dir);

}  // namespace mmusim
