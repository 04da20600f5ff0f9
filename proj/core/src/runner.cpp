#include "mmusim/runner.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "mmusim/errors.hpp"

namespace mmusim {

namespace {

Report run_over_events(const ExperimentConfig& cfg,
                       const std::vector<Event>* trace) {
  Engine engine(cfg.machine, cfg.engine);
  engine.set_config_echo(to_key_values(cfg));
  if (trace) {
    std::size_t i = 0;
    return engine.run([&]() -> std::optional<Event> {
      if (i >= trace->size()) return std::nullopt;
      return (*trace)[i++];
    });
  }
  SynthGenerator gen(cfg.workload.synth);
  return engine.run([&]() -> std::optional<Event> { return gen.next(); });
}

std::string format_row(const SweepRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%llu,%u,%d,%.6f,%.6f,%.6f,%.6f\n",
                static_cast<unsigned long long>(r.l4_size), r.l4_block,
                r.ideal_tlb ? 1 : 0, r.l4_hit_rate, r.l4hit_tlbmiss_per_1k,
                r.avg_walk_cycles, r.est_ipc);
  return buf;
}

SweepRow make_row(const ExperimentConfig& point, const Report& report) {
  SweepRow row;
  row.l4_size = point.machine.caches.l4 ? point.machine.caches.l4->size_bytes
                                        : 0;
  row.l4_block = point.machine.caches.l4
                     ? point.machine.caches.l4->block_bytes
                     : 0;
  row.ideal_tlb = point.engine.ideal_tlb;
  for (const auto& [name, stats] : report.caches.levels) {
    if (name == "l4" && stats.accesses > 0)
      row.l4_hit_rate = static_cast<double>(stats.hits) /
                        static_cast<double>(stats.accesses);
  }
  row.l4hit_tlbmiss_per_1k = report.l4hit_tlbmiss_per_1k();
  row.avg_walk_cycles = report.walk_latency.mean();
  row.est_ipc = report.est_ipc;
  return row;
}

}  // namespace

Report run_single(const ExperimentConfig& cfg) {
  if (cfg.workload.uses_trace()) {
    const std::vector<Event> trace = read_trace_file(cfg.workload.trace_path);
    return run_over_events(cfg, &trace);
  }
  return run_over_events(cfg, nullptr);
}

std::string sweep_csv_header() {
  return "l4_size,l4_block,ideal_tlb,l4_hit_rate,l4hit_tlbmiss_per_1k,"
         "avg_walk_cycles,est_ipc\n";
}

SweepResult run_sweep(const ExperimentConfig& cfg, unsigned jobs) {
  std::vector<ExperimentConfig> points;
  for (const std::uint64_t size : cfg.sweep.l4_sizes) {
    for (const std::uint32_t block : cfg.sweep.l4_blocks) {
      for (const bool ideal : cfg.sweep.ideal_modes) {
        ExperimentConfig point = cfg;
        const std::uint32_t assoc =
            cfg.machine.caches.l4 ? cfg.machine.caches.l4->associativity : 16;
        const std::uint32_t latency =
            cfg.machine.caches.l4 ? cfg.machine.caches.l4->latency_cycles : 20;
        point.machine.caches.l4 = configure_l4(size, block, assoc, latency);
        point.engine.ideal_tlb = ideal;
        points.push_back(std::move(point));
      }
    }
  }

  // Every point replays the identical event stream; load a trace once.
  std::vector<Event> trace;
  const bool uses_trace = cfg.workload.uses_trace();
  if (uses_trace) trace = read_trace_file(cfg.workload.trace_path);

  SweepResult result;
  result.reports.resize(points.size());
  result.rows.resize(points.size());

  const unsigned workers =
      std::max(1u, std::min<unsigned>(jobs, points.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(points.size());
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        result.reports[i] =
            run_over_events(points[i], uses_trace ? &trace : nullptr);
        result.rows[i] = make_row(points[i], result.reports[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty())
      throw InternalError("sweep point " + std::to_string(i) + " failed: " +
                          errors[i]);
  }

  result.csv = sweep_csv_header();
  for (const SweepRow& row : result.rows) result.csv += format_row(row);
  return result;
}

std::vector<std::string> emit_report(const Report& report,
                                     const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto write = [&dir](const std::string& name,
                      const std::string& body) -> std::string {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
    return path;
  };
  std::vector<std::string> paths;
  paths.push_back(write("summary.txt", report.summary_text()));
  paths.push_back(write("walk_latency_hist.csv", report.histogram_csv()));
  paths.push_back(write("walk_locality.csv", report.locality_csv()));
  return paths;
}

}  // namespace mmusim
