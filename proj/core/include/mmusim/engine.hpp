#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "mmusim/cache.hpp"
#include "mmusim/report.hpp"
#include "mmusim/tlb.hpp"
#include "mmusim/vmem.hpp"
#include "mmusim/walker.hpp"
#include "mmusim/workload.hpp"

namespace mmusim {

// Machine-side configuration: translation structures, walker and caches.
struct MachineConfig {
  TlbHierarchyConfig tlb;
  PwcConfig pwc;
  NestedConfig nested;
  HierarchyConfig caches;
};

struct EngineConfig {
  bool ideal_tlb = false;
  double base_cpi = 1.0;
  double overlap = 0.0;  // fraction of walk cycles hidden by the pipeline
  std::uint64_t max_events = 1'000'000;
  bool map_superpages = false;  // touch-allocate 2MB leaves
  // Fold the L2-TLB probe penalty into recorded walk latencies: a walk is
  // only reached after the L2 TLB probe, so the observed cost per miss sits
  // above the bare walk. Calibration term; WalkResult values are never
  // modified.
  bool walk_l2tlb_penalty = true;
  std::uint64_t frame_shuffle_seed = 0;
};

// Per-event outcome, mirroring the lookup -> walk -> access pipeline.
struct StepOutcome {
  bool is_access = false;
  bool tlb_hit = false;
  TlbLookupResult tlb;
  std::optional<WalkResult> walk;
  AccessResult cache;
  std::optional<InterplayCase> interplay;  // data accesses only
};

// The simulation loop: per access, TLB lookup, walk on miss (touch
// allocating the page on first reference), translate, then the cache
// access of the referenced line; classifies every data access into the
// four cache/TLB interplay cases and accumulates the run report.
class Engine {
 public:
  Engine(MachineConfig machine, EngineConfig engine);

  StepOutcome step(const Event& event);

  // Consumes events from `source` until it is exhausted or max_events is
  // reached, then finalizes the report.
  Report run(const std::function<std::optional<Event>()>& source);

  Report report() const;

  TlbHierarchy& tlb() { return tlb_; }
  CacheHierarchy& caches() { return caches_; }
  Walker& walker() { return walker_; }
  AddressSpace& space(Asid asid);
  std::uint64_t walk_count() const { return walk_count_; }

  void set_config_echo(
      std::vector<std::pair<std::string, std::string>> echo) {
    config_echo_ = std::move(echo);
  }

 private:
  void ensure_mapped(AddressSpace& aspace, VirtualAddress va);
  std::uint64_t physical_address(Asid asid, VirtualAddress va);
  void on_switch(const Event& event);

  MachineConfig machine_;
  EngineConfig cfg_;
  TlbHierarchy tlb_;
  CacheHierarchy caches_;
  Walker walker_;

  std::unordered_map<Asid, std::unique_ptr<AddressSpace>> spaces_;
  std::unordered_map<Asid, std::unique_ptr<AddressSpace>> guest_spaces_;
  std::unique_ptr<AddressSpace> nested_space_;
  std::uint32_t next_window_ = 0;
  std::unordered_map<std::uint32_t, Asid> bindings_;  // tid -> asid

  // Accumulators.
  std::uint64_t events_ = 0;
  std::uint64_t instructions_ = 0;
  std::uint64_t data_accesses_ = 0;
  std::uint64_t inst_accesses_ = 0;
  std::uint64_t context_switches_ = 0;
  std::uint64_t walk_count_ = 0;
  std::uint64_t walk_ref_total_ = 0;
  LatencyHistogram hist_;
  std::array<std::array<std::uint64_t, kMemLevels>, kMaxWalkLevels>
      locality_{};
  std::array<std::unordered_set<std::uint64_t>, kMaxWalkLevels> pte_lines_;
  std::uint64_t data_tlb_lookups_ = 0;
  std::uint64_t data_tlb_hits_ = 0;
  std::uint64_t inst_tlb_lookups_ = 0;
  std::uint64_t inst_tlb_hits_ = 0;
  std::array<std::uint64_t, 4> interplay_{};
  std::uint64_t l4_data_hits_ = 0;
  std::uint64_t l4_data_hits_tlb_miss_ = 0;
  std::uint64_t data_cycles_ = 0;
  std::uint64_t walk_cycles_ = 0;
  std::vector<std::pair<std::string, std::string>> config_echo_;
};

}  // namespace mmusim
