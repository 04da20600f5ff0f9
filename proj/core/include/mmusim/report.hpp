#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mmusim/cache.hpp"
#include "mmusim/types.hpp"

namespace mmusim {

// Fixed-width latency histogram; the last bucket catches everything at or
// above the covered range.
class LatencyHistogram {
 public:
  explicit LatencyHistogram(std::uint32_t bucket_width = 16,
                            std::uint32_t max_cycles = 1024);

  void record(std::uint64_t cycles);

  std::uint64_t total_count() const { return count_; }
  std::uint64_t total_cycles() const { return sum_; }
  double mean() const {
    return count_ == 0 ? 0.0
                       : static_cast<double>(sum_) / static_cast<double>(count_);
  }
  std::uint64_t min() const { return count_ == 0 ? 0 : min_; }
  std::uint64_t max() const { return max_; }

  struct Bucket {
    std::uint64_t low;
    std::uint64_t high;  // exclusive; last bucket is open-ended
    std::uint64_t count;
  };
  std::vector<Bucket> buckets() const;

 private:
  std::uint32_t width_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t count_ = 0;
  std::uint64_t sum_ = 0;
  std::uint64_t min_ = ~std::uint64_t{0};
  std::uint64_t max_ = 0;
};

struct TlbStructStats {
  std::string name;
  std::uint64_t lookups = 0;
  std::uint64_t hits = 0;
  double hit_rate() const {
    return lookups == 0 ? 0.0
                        : static_cast<double>(hits) /
                              static_cast<double>(lookups);
  }
};

// The four Table-I outcomes of (cache hit/miss x TLB hit/miss) for data
// accesses: cache hit means serviced at L4 or above.
enum class InterplayCase : std::uint8_t {
  HitHit = 0,
  MissHit = 1,
  HitMiss = 2,
  MissMiss = 3
};

const char* interplay_case_name(InterplayCase c);

// Everything one run produces. Counters are exact; derived fractions are
// computed at render time so the accounting stays rational.
struct Report {
  std::vector<std::pair<std::string, std::string>> config_echo;

  std::uint64_t events = 0;
  std::uint64_t instructions = 0;  // Access events
  std::uint64_t data_accesses = 0;
  std::uint64_t inst_accesses = 0;
  std::uint64_t context_switches = 0;

  // Walks. Recorded latency may include the L2-TLB probe penalty knob.
  std::uint64_t walk_count = 0;
  LatencyHistogram walk_latency;
  std::array<std::array<std::uint64_t, kMemLevels>, kMaxWalkLevels>
      locality_counts{};  // [PL4..PL1][L1..MEM]
  std::array<std::uint64_t, kMaxWalkLevels> distinct_pte_lines{};

  // TLB side.
  std::vector<TlbStructStats> tlb_stats;  // l1i, l1d, super, l2
  std::uint64_t data_tlb_lookups = 0;
  std::uint64_t data_tlb_hits = 0;
  std::uint64_t inst_tlb_lookups = 0;
  std::uint64_t inst_tlb_hits = 0;
  bool ideal_tlb = false;

  // Interplay and the reach metric.
  std::array<std::uint64_t, 4> interplay{};
  std::uint64_t l4_data_hits = 0;
  std::uint64_t l4_data_hits_tlb_miss = 0;
  bool l4_enabled = false;

  // Cache side.
  HierarchySnapshot caches;

  // Cycle model.
  double base_cpi = 1.0;
  double overlap = 0.0;
  std::uint64_t data_cycles = 0;
  std::uint64_t walk_cycles = 0;  // recorded walk cycles (with penalty knob)
  double est_cycles = 0.0;
  double est_ipc = 0.0;

  double data_tlb_hit_rate() const {
    return data_tlb_lookups == 0
               ? 0.0
               : static_cast<double>(data_tlb_hits) /
                     static_cast<double>(data_tlb_lookups);
  }

  // Reach metric: 1000 * (L4 data hits that were TLB misses) / L4 data
  // hits, exact in the counters; 0 with the degenerate flag when there were
  // no L4 hits.
  double l4hit_tlbmiss_per_1k() const {
    return l4_data_hits == 0 ? 0.0
                             : 1000.0 *
                                   static_cast<double>(l4_data_hits_tlb_miss) /
                                   static_cast<double>(l4_data_hits);
  }
  bool l4_metric_degenerate() const { return l4_data_hits == 0; }

  std::string summary_text() const;
  std::string histogram_csv() const;
  std::string locality_csv() const;
};

// IPC of `variant` normalized to `base`; both runs must cover the same
// event stream. Throws MismatchedRuns when instruction counts differ.
double normalized_ipc(const Report& base, const Report& variant);

}  // namespace mmusim
