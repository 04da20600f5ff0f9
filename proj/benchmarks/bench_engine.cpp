#include <benchmark/benchmark.h>

#include "mmusim/engine.hpp"

using namespace mmusim;

// End-to-end events per second over the default machine.
static void BM_EngineStep(benchmark::State& state) {
  Engine engine((MachineConfig()), EngineConfig{});
  SynthConfig synth;
  synth.footprint_bytes = static_cast<std::uint64_t>(state.range(0));
  synth.page_locality = PageLocality::Zipf;
  synth.zipf_s = 1.0;
  SynthGenerator gen(synth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.step(gen.next()));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EngineStep)->Arg(1 << 20)->Arg(64 << 20)->Arg(512 << 20);

static void BM_SynthGenerate(benchmark::State& state) {
  SynthConfig synth;
  synth.footprint_bytes = 128ull << 20;
  synth.page_locality = PageLocality::Zipf;
  synth.zipf_s = 1.2;
  synth.inst_ratio = 0.3;
  SynthGenerator gen(synth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen.next());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SynthGenerate);
