#include "mmusim/report.hpp"

#include <cstdarg>
#include <cstdio>

#include "mmusim/errors.hpp"

namespace mmusim {

namespace {

void appendf(std::string& out, const char* fmt, ...)
    __attribute__((format(printf, 2, 3)));

void appendf(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  out += buf;
}

constexpr const char* kWalkLevelNames[kMaxWalkLevels] = {"PL4", "PL3", "PL2",
                                                         "PL1"};

}  // namespace

const char* interplay_case_name(InterplayCase c) {
  switch (c) {
    case InterplayCase::HitHit: return "cache_hit_tlb_hit";
    case InterplayCase::MissHit: return "cache_miss_tlb_hit";
    case InterplayCase::HitMiss: return "cache_hit_tlb_miss";
    case InterplayCase::MissMiss: return "cache_miss_tlb_miss";
  }
  return "?";
}

LatencyHistogram::LatencyHistogram(std::uint32_t bucket_width,
                                   std::uint32_t max_cycles)
    : width_(bucket_width), counts_(max_cycles / bucket_width + 1, 0) {}

void LatencyHistogram::record(std::uint64_t cycles) {
  std::size_t idx = static_cast<std::size_t>(cycles / width_);
  if (idx >= counts_.size()) idx = counts_.size() - 1;
  ++counts_[idx];
  ++count_;
  sum_ += cycles;
  if (cycles < min_) min_ = cycles;
  if (cycles > max_) max_ = cycles;
}

std::vector<LatencyHistogram::Bucket> LatencyHistogram::buckets() const {
  std::vector<Bucket> out;
  out.reserve(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const std::uint64_t low = static_cast<std::uint64_t>(i) * width_;
    const bool last = i + 1 == counts_.size();
    out.push_back(Bucket{low, last ? ~std::uint64_t{0} : low + width_,
                         counts_[i]});
  }
  return out;
}

std::string Report::summary_text() const {
  std::string out;
  out += "# mmusim report\n";
  for (const auto& [key, value] : config_echo)
    appendf(out, "config.%s = %s\n", key.c_str(), value.c_str());

  appendf(out, "events = %llu\n", (unsigned long long)events);
  appendf(out, "instructions = %llu\n", (unsigned long long)instructions);
  appendf(out, "data_accesses = %llu\n", (unsigned long long)data_accesses);
  appendf(out, "inst_accesses = %llu\n", (unsigned long long)inst_accesses);
  appendf(out, "context_switches = %llu\n",
          (unsigned long long)context_switches);
  appendf(out, "ideal_tlb = %d\n", ideal_tlb ? 1 : 0);

  appendf(out, "walks = %llu\n", (unsigned long long)walk_count);
  appendf(out, "walk_latency.mean = %.6f\n", walk_latency.mean());
  appendf(out, "walk_latency.min = %llu\n",
          (unsigned long long)walk_latency.min());
  appendf(out, "walk_latency.max = %llu\n",
          (unsigned long long)walk_latency.max());
  appendf(out, "walk_cycles = %llu\n", (unsigned long long)walk_cycles);

  for (const TlbStructStats& t : tlb_stats) {
    appendf(out, "tlb.%s.lookups = %llu\n", t.name.c_str(),
            (unsigned long long)t.lookups);
    appendf(out, "tlb.%s.hits = %llu\n", t.name.c_str(),
            (unsigned long long)t.hits);
    appendf(out, "tlb.%s.hit_rate = %.6f\n", t.name.c_str(), t.hit_rate());
  }
  appendf(out, "tlb.data.lookups = %llu\n",
          (unsigned long long)data_tlb_lookups);
  appendf(out, "tlb.data.hits = %llu\n", (unsigned long long)data_tlb_hits);
  appendf(out, "tlb.data.hit_rate = %.6f\n", data_tlb_hit_rate());
  appendf(out, "tlb.inst.lookups = %llu\n",
          (unsigned long long)inst_tlb_lookups);
  appendf(out, "tlb.inst.hits = %llu\n", (unsigned long long)inst_tlb_hits);

  for (unsigned c = 0; c < 4; ++c)
    appendf(out, "interplay.%s = %llu\n",
            interplay_case_name(static_cast<InterplayCase>(c)),
            (unsigned long long)interplay[c]);

  appendf(out, "l4.enabled = %d\n", l4_enabled ? 1 : 0);
  appendf(out, "l4.data_hits = %llu\n", (unsigned long long)l4_data_hits);
  appendf(out, "l4.data_hits_tlb_miss = %llu\n",
          (unsigned long long)l4_data_hits_tlb_miss);
  appendf(out, "l4.hit_tlbmiss_per_1k = %llu/%llu\n",
          (unsigned long long)(1000 * l4_data_hits_tlb_miss),
          (unsigned long long)l4_data_hits);
  appendf(out, "l4.hit_tlbmiss_per_1k_value = %.6f\n", l4hit_tlbmiss_per_1k());
  appendf(out, "l4.metric_degenerate = %d\n", l4_metric_degenerate() ? 1 : 0);

  for (const auto& [name, stats] : caches.levels) {
    appendf(out, "cache.%s.accesses = %llu\n", name.c_str(),
            (unsigned long long)stats.accesses);
    appendf(out, "cache.%s.hits = %llu\n", name.c_str(),
            (unsigned long long)stats.hits);
    appendf(out, "cache.%s.misses = %llu\n", name.c_str(),
            (unsigned long long)stats.misses);
    appendf(out, "cache.%s.writebacks = %llu\n", name.c_str(),
            (unsigned long long)stats.writebacks);
  }
  appendf(out, "mem.accesses = %llu\n",
          (unsigned long long)caches.mem_accesses);

  for (unsigned l = 0; l < kMaxWalkLevels; ++l) {
    appendf(out, "walk.%s.distinct_lines = %llu\n", kWalkLevelNames[l],
            (unsigned long long)distinct_pte_lines[l]);
  }

  appendf(out, "cycles.base_cpi = %.6f\n", base_cpi);
  appendf(out, "cycles.overlap = %.6f\n", overlap);
  appendf(out, "cycles.data = %llu\n", (unsigned long long)data_cycles);
  appendf(out, "cycles.walk = %llu\n", (unsigned long long)walk_cycles);
  appendf(out, "est_cycles = %.6f\n", est_cycles);
  appendf(out, "est_ipc = %.6f\n", est_ipc);
  return out;
}

std::string Report::histogram_csv() const {
  std::string out = "bucket_low,bucket_high,count\n";
  for (const auto& b : walk_latency.buckets()) {
    if (b.high == ~std::uint64_t{0})
      appendf(out, "%llu,inf,%llu\n", (unsigned long long)b.low,
              (unsigned long long)b.count);
    else
      appendf(out, "%llu,%llu,%llu\n", (unsigned long long)b.low,
              (unsigned long long)b.high, (unsigned long long)b.count);
  }
  return out;
}

std::string Report::locality_csv() const {
  std::string out = "level,l1,l2,l3,l4,mem\n";
  for (unsigned l = 0; l < kMaxWalkLevels; ++l) {
    std::uint64_t total = 0;
    for (unsigned s = 0; s < kMemLevels; ++s) total += locality_counts[l][s];
    appendf(out, "%s", kWalkLevelNames[l]);
    for (unsigned s = 0; s < kMemLevels; ++s) {
      const double frac =
          total == 0 ? 0.0
                     : static_cast<double>(locality_counts[l][s]) /
                           static_cast<double>(total);
      appendf(out, ",%.6f", frac);
    }
    out += "\n";
  }
  return out;
}

double normalized_ipc(const Report& base, const Report& variant) {
  if (base.instructions != variant.instructions)
    throw MismatchedRuns("normalized_ipc: instruction counts differ (" +
                         std::to_string(base.instructions) + " vs " +
                         std::to_string(variant.instructions) + ")");
  if (base.instructions == 0) return 1.0;
  return base.est_cycles / variant.est_cycles;
}

}  // namespace mmusim
