// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmusim/config.hpp"
#include "mmusim/engine.hpp"
#include "mmusim/rng.hpp"
#include "mmusim/runner.hpp"
#include "mmusim/tlb.hpp"
#include "mmusim/walker.hpp"
#include "oracles.hpp"

using namespace mmusim;

namespace {

struct CheckFailure {
  std::string detail;
};

void expect(bool ok, const std::string& detail) {
  if (!ok) throw CheckFailure{detail};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Report run_synth(const MachineConfig& machine, const EngineConfig& engine_cfg,
                 const SynthConfig& synth, std::uint64_t events) {
  Engine engine(machine, engine_cfg);
  SynthGenerator gen(synth);
  std::uint64_t budget = events;
  return engine.run([&]() -> std::optional<Event> {
    if (budget-- == 0) return std::nullopt;
    return gen.next();
  });
}

// --- criterion bodies ----------------------------------------------------

// 1. ref_count(4,4) = 24 with exactly 24 hierarchy accesses; native = 4.
void criterion_nested_refs() {
  expect(nested_ref_count(4, 4) == 24, "closed form (4,4) != 24");
  expect(nested_ref_count(4, 0) == 4, "closed form (4,0) != 4");

  AddressSpace guest(1, FrameAllocOptions{2, 1 << 20, 0});
  AddressSpace nested(2, FrameAllocOptions{1 << 20, 1 << 20, 0});
  CacheHierarchy hier{HierarchyConfig{}};
  Walker walker;
  const VirtualAddress gva{0x4000};
  Walker::ensure_nested_mapped(guest, nested, gva);

  const std::uint64_t ptw_before =
      hier.snapshot().by_kind[static_cast<unsigned>(AccessKind::Ptw)].accesses;
  const WalkResult r = walker.nested_walk(guest, nested, gva, hier);
  const std::uint64_t ptw_after =
      hier.snapshot().by_kind[static_cast<unsigned>(AccessKind::Ptw)].accesses;
  expect(r.refs.size() == 24, "nested walk issued " +
                                  std::to_string(r.refs.size()) + " refs");
  expect(ptw_after - ptw_before == 24,
         "hierarchy saw " + std::to_string(ptw_after - ptw_before) +
             " ptw accesses");
  expect(r.refs.size() == oracles::enumerate_nested_refs(4, 4),
         "enumeration oracle disagrees");

  AddressSpace native(0);
  native.map_page(VirtualAddress{0x4000});
  const WalkResult nr = walker.walk(native, VirtualAddress{0x4000}, hier);
  expect(nr.refs.size() == 4, "native walk issued " +
                                  std::to_string(nr.refs.size()) + " refs");
}

// 2. Reach: 256 KiB / 4 MiB / 64 MiB for the baseline TLBs.
void criterion_reach() {
  const TlbHierarchyConfig cfg;
  expect(tlb_reach_bytes(cfg.l1d) == 256 * 1024,
         "L1 reach " + std::to_string(tlb_reach_bytes(cfg.l1d)));
  expect(tlb_reach_bytes(cfg.l1i) == 256 * 1024, "L1I reach");
  expect(tlb_reach_bytes(cfg.l2) == 4ull << 20,
         "L2 reach " + std::to_string(tlb_reach_bytes(cfg.l2)));
  expect(tlb_reach_bytes(cfg.superpage) == 64ull << 20,
         "superpage reach " +
             std::to_string(tlb_reach_bytes(cfg.superpage)));
}

// 3. Envelope 4 <= WalkResult latency <= 936 on baseline defaults, and a
// low-locality run's mean recorded walk latency inside [20, 150].
void criterion_walk_envelope() {
  MachineConfig machine;  // baseline defaults, PWC off
  Engine engine(machine, EngineConfig{});
  SynthConfig synth;
  synth.seed = 1234;
  synth.footprint_bytes = 128ull << 20;  // far beyond the 4 MiB L2 reach
  synth.page_locality = PageLocality::Uniform;
  SynthGenerator gen(synth);

  std::uint64_t lo = ~std::uint64_t{0}, hi = 0;
  for (int i = 0; i < 1000000; ++i) {
    const StepOutcome out = engine.step(gen.next());
    if (out.walk) {
      const std::uint32_t cycles = out.walk->latency_cycles;
      if (cycles < lo) lo = cycles;
      if (cycles > hi) hi = cycles;
      expect(cycles >= 4 && cycles <= 936,
             "walk latency " + std::to_string(cycles) + " outside [4,936]");
    }
  }
  const Report r = engine.report();
  expect(r.walk_count > 0, "no walks happened");
  const double mean = r.walk_latency.mean();
  expect(mean >= 20.0 && mean <= 150.0,
         "mean walk latency " + fmt(mean) + " outside [20,150]");
}

// 4. Ideal-TLB runs report l4hit_tlbmiss_per_1k = 0 exactly.
void criterion_oracle_bound() {
  EngineConfig ideal;
  ideal.ideal_tlb = true;
  SynthConfig synth;
  synth.seed = 7;
  synth.footprint_bytes = 64ull << 20;
  const Report r = run_synth(MachineConfig{}, ideal, synth, 300000);
  expect(r.l4_data_hits > 0, "degenerate run: no L4 hits at all");
  expect(r.l4_data_hits_tlb_miss == 0, "ideal TLB produced TLB misses");
  expect(r.l4hit_tlbmiss_per_1k() == 0.0, "metric not exactly 0");
}

// 5. normalized_ipc(base, ideal) >= 1.0 across >= 20 seed-varied configs;
// equality exactly when the base run never walked.
void criterion_ideal_dominance() {
  Rng rng(20260808);
  int strict = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SynthConfig synth;
    synth.seed = rng.next();
    synth.footprint_bytes = (std::uint64_t{1} << (16 + rng.next_below(10)));
    synth.page_locality =
        rng.next_bool(0.5) ? PageLocality::Zipf : PageLocality::Uniform;
    synth.zipf_s = 0.6 + rng.next_double();
    synth.intra_page =
        rng.next_bool(0.5) ? IntraPage::Sequential : IntraPage::Random;
    synth.inst_ratio = rng.next_double() * 0.4;
    synth.switch_period = rng.next_bool(0.3) ? 500 + rng.next_below(5000) : 0;
    synth.threads = 1 + static_cast<std::uint32_t>(rng.next_below(4));

    EngineConfig base_cfg;
    EngineConfig ideal_cfg;
    ideal_cfg.ideal_tlb = true;
    const Report base = run_synth(MachineConfig{}, base_cfg, synth, 50000);
    const Report ideal = run_synth(MachineConfig{}, ideal_cfg, synth, 50000);
    const double ratio = normalized_ipc(base, ideal);
    expect(ratio >= 1.0, "trial " + std::to_string(trial) + ": ratio " +
                             fmt(ratio) + " < 1");
    if (base.walk_count > 0) {
      expect(ratio > 1.0, "trial " + std::to_string(trial) +
                              ": walks happened but ratio == 1");
      ++strict;
    } else {
      expect(ratio == 1.0, "trial " + std::to_string(trial) +
                               ": no walks but ratio != 1");
    }
  }
  expect(strict > 0, "no trial exercised the strict case");

  // Walk-free case: an empty stream gives exactly 1.0.
  Engine a(MachineConfig{}, EngineConfig{});
  EngineConfig ideal_cfg;
  ideal_cfg.ideal_tlb = true;
  Engine c(MachineConfig{}, ideal_cfg);
  auto empty = []() -> std::optional<Event> { return std::nullopt; };
  const Report base_empty = a.run(empty);
  const Report ideal_empty = c.run(empty);
  expect(base_empty.walk_count == 0, "empty trace walked");
  expect(normalized_ipc(base_empty, ideal_empty) == 1.0,
         "empty trace ratio != 1");
}

// 6. Distinct PTE lines per level are monotone PL4 <= ... <= PL1 and every
// level's locality fractions account for every reference exactly.
void criterion_fanout_locality() {
  SynthConfig synth;
  synth.seed = 99;
  synth.footprint_bytes = 32ull << 20;
  synth.page_locality = PageLocality::Zipf;
  synth.zipf_s = 0.9;
  synth.inst_ratio = 0.15;
  const Report r = run_synth(MachineConfig{}, EngineConfig{}, synth, 400000);

  expect(r.walk_count > 0, "no walks");
  for (unsigned l = 0; l + 1 < kMaxWalkLevels; ++l) {
    expect(r.distinct_pte_lines[l] <= r.distinct_pte_lines[l + 1],
           "PL" + std::to_string(4 - l) + " lines " +
               std::to_string(r.distinct_pte_lines[l]) + " > PL" +
               std::to_string(3 - l) + " lines " +
               std::to_string(r.distinct_pte_lines[l + 1]));
  }
  // Exact rational accounting: per-level counts sum to the level's total,
  // so the rendered fractions sum to 1 by construction.
  std::uint64_t total_refs = 0;
  for (unsigned l = 0; l < kMaxWalkLevels; ++l) {
    std::uint64_t row = 0;
    for (unsigned s = 0; s < kMemLevels; ++s) row += r.locality_counts[l][s];
    total_refs += row;
    if (l == 0)
      expect(row == r.walk_count,
             "PL4 must be read once per full walk with the PWC off");
  }
  expect(total_refs == 4 * r.walk_count,
         "4KB walks must issue 4 refs each with the PWC off");
}

// 7. TLB and single-level cache hit/miss streams equal the stack-distance
// oracle on 1e5-reference random streams (fully associative).
void criterion_lru_oracle() {
  Tlb tlb(TlbConfig{"t", 64, 0, PageSize::Page4K});
  oracles::LruStackOracle tlb_oracle(64);
  Rng rng(424242);
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t vpn = rng.next_below(200);
    const bool hit = tlb.lookup(3, vpn).has_value();
    if (hit != tlb_oracle.access(vpn))
      throw CheckFailure{"TLB diverged from the stack oracle at ref " +
                         std::to_string(i)};
    if (!hit) tlb.insert(3, vpn, vpn);
  }

  Cache cache(CacheConfig{"fa", 128 * 64, 128, 64, 1});
  oracles::LruStackOracle cache_oracle(128);
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t block = rng.next_below(400);
    const bool hit = cache.probe(block * 64, true);
    if (hit != cache_oracle.access(block))
      throw CheckFailure{"cache diverged from the stack oracle at ref " +
                         std::to_string(i)};
    if (!hit) cache.fill(block * 64);
  }
}

// 8. Small footprints keep the dTLB nearly perfect; footprints between the
// L1 and L2 reaches leave L1 misses to the L2, with the overall rate
// inside the configured band.
void criterion_tlb_hit_bands() {
  SynthConfig small;
  small.seed = 11;
  small.footprint_bytes = 64 * 4096;  // <= L1 reach
  const Report r_small =
      run_synth(MachineConfig{}, EngineConfig{}, small, 1000000);
  expect(r_small.data_tlb_hit_rate() > 0.99,
         "small-footprint dTLB rate " + fmt(r_small.data_tlb_hit_rate()));

  // Between the reaches: 512 pages, zipf-tuned.
  SynthConfig mid;
  mid.seed = 12;
  mid.footprint_bytes = 512 * 4096;
  mid.page_locality = PageLocality::Zipf;
  mid.zipf_s = 1.2;
  Engine engine(MachineConfig{}, EngineConfig{});
  SynthGenerator gen(mid);
  std::uint64_t l1_miss = 0, l2_catch = 0;
  for (int i = 0; i < 1000000; ++i) {
    const StepOutcome out = engine.step(gen.next());
    if (!out.is_access) continue;
    if (out.tlb.level == TlbHitLevel::L2) {
      ++l1_miss;
      ++l2_catch;
    } else if (!out.tlb_hit) {
      ++l1_miss;
    }
  }
  const Report r_mid = engine.report();
  // Band pinned to include the 90-95% range typical of warm workloads.
  const double band_lo = 0.90, band_hi = 1.0;
  const double rate = r_mid.data_tlb_hit_rate();
  expect(rate >= band_lo && rate <= band_hi,
         "mid-footprint rate " + fmt(rate) + " outside band");
  expect(l1_miss > 0, "footprint never missed L1");
  const double caught = static_cast<double>(l2_catch) /
                        static_cast<double>(l1_miss);
  expect(caught > 0.95, "L2 caught only " + fmt(caught) + " of L1 misses");
}

// 9/10 share a sweep configuration: 64B blocks over the default size grid.
ExperimentConfig sweep_config() {
  ExperimentConfig cfg;
  cfg.workload.synth.seed = 2718;
  cfg.workload.synth.footprint_bytes = 128ull << 20;
  cfg.workload.synth.page_locality = PageLocality::Uniform;
  cfg.engine.max_events = 250000;
  cfg.sweep.l4_blocks = {64};
  return cfg;
}

SweepResult g_sweep_a;  // reused by criterion 10

// 9. Baseline l4hit_tlbmiss_per_1k > 0 at every L4 size; ideal rows are
// identically 0: growing the cache never closes the reach gap by itself.
void criterion_sweep_shape() {
  g_sweep_a = run_sweep(sweep_config(), 2);
  expect(g_sweep_a.rows.size() == 10, "expected 5 sizes x {base, ideal}");
  for (const SweepRow& row : g_sweep_a.rows) {
    if (row.ideal_tlb) {
      expect(row.l4hit_tlbmiss_per_1k == 0.0,
             "ideal row at size " + std::to_string(row.l4_size) +
                 " is nonzero");
    } else {
      expect(row.l4hit_tlbmiss_per_1k > 0.0,
             "baseline row at size " + std::to_string(row.l4_size) +
                 " is zero");
    }
  }
}

// 10. Two identical sweep runs produce byte-identical CSVs.
void criterion_determinism() {
  if (g_sweep_a.rows.empty()) g_sweep_a = run_sweep(sweep_config(), 2);
  const SweepResult again = run_sweep(sweep_config(), 2);
  expect(again.csv == g_sweep_a.csv, "CSVs differ between reruns");
  expect(!again.csv.empty(), "empty CSV");
}

struct Criterion {
  int id;
  const char* what;
  std::function<void()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "nested-walk reference count (24 nested / 4 native)",
       criterion_nested_refs},
      {2, "TLB reach arithmetic (256 KiB / 4 MiB / 64 MiB)", criterion_reach},
      {3, "walk-latency envelope [4,936] and mean in [20,150]",
       criterion_walk_envelope},
      {4, "oracle bound: ideal TLB => l4hit_tlbmiss_per_1k == 0",
       criterion_oracle_bound},
      {5, "ideal-TLB dominance over 20 randomized configs",
       criterion_ideal_dominance},
      {6, "fan-out locality monotonicity and exact accounting",
       criterion_fanout_locality},
      {7, "LRU oracle equivalence (TLB and single-level cache)",
       criterion_lru_oracle},
      {8, "TLB hit-rate bands (small and mid footprints)",
       criterion_tlb_hit_bands},
      {9, "sweep shape: baseline > 0 everywhere, ideal identically 0",
       criterion_sweep_shape},
      {10, "byte-identical sweep reruns", criterion_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    try {
      c.body();
      std::printf("PASS  %2d  %s\n", c.id, c.what);
    } catch (const CheckFailure& f) {
      std::printf("FAIL  %2d  %s: %s\n", c.id, c.what, f.detail.c_str());
      ++failures;
    } catch (const std::exception& e) {
      std::printf("FAIL  %2d  %s: exception: %s\n", c.id, c.what, e.what());
      ++failures;
    }
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
