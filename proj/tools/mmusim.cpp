// mmusim: trace-driven simulator of x86-64 style address translation
// (multi-level TLBs, page-walk caches, hardware radix walker, optional
// nested walks) over an L1-L4 cache hierarchy with a die-stacked L4.
//
// Single run:  mmusim --config machine.cfg --trace app.trace --out out/
// Sweep:       mmusim --config machine.cfg --sweep --jobs 4 --out out/

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mmusim/config.hpp"
#include "mmusim/errors.hpp"
#include "mmusim/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitTrace = 2;
constexpr int kExitInternal = 3;

std::string point_dir_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "point_%03zu", index);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mmusim: TLB / page-walk / die-stacked-cache interplay simulator"};

  std::string config_path;
  std::string trace_path;
  std::string out_dir = "out";
  bool sweep = false;
  bool ideal_tlb = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_events;
  unsigned jobs = 1;

  app.add_option("--config", config_path,
                 "Experiment config file (section.key = value lines); "
                 "omitted keys take the baseline machine defaults");
  app.add_option("--trace", trace_path,
                 "Trace file (overrides the config's workload)");
  app.add_option("--out", out_dir, "Output directory")
      ->capture_default_str();
  app.add_flag("--sweep", sweep,
               "Run the L4 size/block x TLB-mode sweep grid");
  app.add_flag("--ideal-tlb", ideal_tlb,
               "Force the ideal TLB model for a single run");
  app.add_option("--seed", seed,
                 "Synthetic workload seed (falls back to MMU_SIM_SEED)");
  app.add_option("--max-events", max_events, "Event budget per run");
  app.add_option("--jobs", jobs, "Parallel sweep workers")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    mmusim::ExperimentConfig cfg = config_path.empty()
                                       ? mmusim::default_config()
                                       : mmusim::parse_config_file(config_path);

    // Flags override file keys.
    if (!trace_path.empty()) cfg.workload.trace_path = trace_path;
    if (ideal_tlb) cfg.engine.ideal_tlb = true;
    if (!seed) {
      if (const char* env = std::getenv("MMU_SIM_SEED"))
        seed = std::strtoull(env, nullptr, 0);
    }
    if (seed) cfg.workload.synth.seed = *seed;
    if (max_events) cfg.engine.max_events = *max_events;
    mmusim::validate_config(cfg);

    if (sweep) {
      const mmusim::SweepResult result = mmusim::run_sweep(cfg, jobs);
      std::filesystem::create_directories(out_dir);
      const std::string csv_path = out_dir + "/sweep.csv";
      {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + csv_path);
        out << result.csv;
      }
      std::printf("%s\n", csv_path.c_str());
      for (std::size_t i = 0; i < result.reports.size(); ++i) {
        const auto paths = mmusim::emit_report(
            result.reports[i], out_dir + "/" + point_dir_name(i));
        for (const auto& p : paths) std::printf("%s\n", p.c_str());
      }
    } else {
      const mmusim::Report report = mmusim::run_single(cfg);
      for (const auto& p : mmusim::emit_report(report, out_dir))
        std::printf("%s\n", p.c_str());
    }
    return kExitOk;
  } catch (const mmusim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const mmusim::ParseError& e) {
    std::fprintf(stderr, "trace error: %s\n", e.what());
    return kExitTrace;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
}
