#include <benchmark/benchmark.h>

#include "mmusim/cache.hpp"
#include "mmusim/rng.hpp"

using namespace mmusim;

static void BM_CacheHit(benchmark::State& state) {
  Cache cache(CacheConfig{"l1", 32 * 1024, 8, 64, 4});
  cache.fill(0x1000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.probe(0x1000, true));
  }
}
BENCHMARK(BM_CacheHit);

static void BM_CacheFillEvict(benchmark::State& state) {
  Cache cache(CacheConfig{"l1", 32 * 1024, 8, 64, 4});
  std::uint64_t addr = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.fill(addr));
    addr += 64;
  }
}
BENCHMARK(BM_CacheFillEvict);

static void BM_HierarchyAccess(benchmark::State& state) {
  HierarchyConfig cfg;
  cfg.l4 = configure_l4(64ull << 20, 64);
  CacheHierarchy hier(cfg);
  Rng rng(7);
  const std::uint64_t span = state.range(0);
  for (auto _ : state) {
    const std::uint64_t paddr = rng.next_below(span) & ~std::uint64_t{7};
    benchmark::DoNotOptimize(
        hier.access(paddr, AccessKind::Data, AccessType::Read));
  }
}
BENCHMARK(BM_HierarchyAccess)->Arg(16 << 10)->Arg(8 << 20)->Arg(256 << 20);
