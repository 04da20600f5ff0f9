#include <benchmark/benchmark.h>

#include "mmusim/rng.hpp"
#include "mmusim/vmem.hpp"
#include "mmusim/walker.hpp"

using namespace mmusim;

static void BM_WalkWarm(benchmark::State& state) {
  AddressSpace aspace(0);
  CacheHierarchy hier((HierarchyConfig()));
  const bool pwc_on = state.range(0) != 0;
  Walker walker(PwcConfig{pwc_on, {16, 16, 16}, 1});
  const std::uint64_t pages = 1024;
  for (std::uint64_t p = 0; p < pages; ++p)
    aspace.map_page(VirtualAddress{p << 12});
  Rng rng(3);
  for (auto _ : state) {
    const VirtualAddress va{rng.next_below(pages) << 12};
    benchmark::DoNotOptimize(walker.walk(aspace, va, hier));
  }
}
BENCHMARK(BM_WalkWarm)->Arg(0)->Arg(1);

static void BM_NestedWalk(benchmark::State& state) {
  AddressSpace guest(1, FrameAllocOptions{256, 1 << 22, 0});
  AddressSpace nested(2, FrameAllocOptions{1 << 22, 1 << 22, 0});
  CacheHierarchy hier((HierarchyConfig()));
  Walker walker;
  const std::uint64_t pages = 256;
  for (std::uint64_t p = 0; p < pages; ++p)
    Walker::ensure_nested_mapped(guest, nested, VirtualAddress{p << 12});
  Rng rng(5);
  for (auto _ : state) {
    const VirtualAddress va{rng.next_below(pages) << 12};
    benchmark::DoNotOptimize(walker.nested_walk(guest, nested, va, hier));
  }
}
BENCHMARK(BM_NestedWalk);
