#include <benchmark/benchmark.h>

#include "mmusim/rng.hpp"
#include "mmusim/tlb.hpp"

using namespace mmusim;

static void BM_TlbLookupHit(benchmark::State& state) {
  Tlb tlb(TlbConfig{"l1d", 64, 0, PageSize::Page4K});
  for (std::uint64_t vpn = 0; vpn < 64; ++vpn) tlb.insert(0, vpn, vpn + 100);
  std::uint64_t vpn = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlb.lookup(0, vpn));
    vpn = (vpn + 1) & 63;
  }
}
BENCHMARK(BM_TlbLookupHit);

static void BM_TlbInsertEvict(benchmark::State& state) {
  Tlb tlb(TlbConfig{"l2", 1024, 0, PageSize::Page4K});
  std::uint64_t vpn = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlb.insert(0, vpn, vpn + 1));
    ++vpn;
  }
}
BENCHMARK(BM_TlbInsertEvict);

static void BM_HierarchyLookup(benchmark::State& state) {
  TlbHierarchy hier(TlbHierarchyConfig{});
  Rng rng(11);
  const std::uint64_t pages = state.range(0);
  for (std::uint64_t p = 0; p < pages; ++p)
    hier.insert(0, VirtualAddress{p << 12}, p + 5, PageSize::Page4K,
                AccessKind::Data);
  for (auto _ : state) {
    const VirtualAddress va{rng.next_below(pages) << 12};
    benchmark::DoNotOptimize(hier.lookup(0, va, AccessKind::Data));
  }
}
BENCHMARK(BM_HierarchyLookup)->Arg(32)->Arg(512)->Arg(4096);
