#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmusim/types.hpp"
#include "mmusim/vaddr.hpp"

namespace mmusim {

// Geometry of one translation structure. associativity 0 means fully
// associative; otherwise entries must divide evenly into sets.
struct TlbConfig {
  std::string name;
  std::uint32_t entries = 64;
  std::uint32_t associativity = 0;  // 0 = fully associative
  PageSize page_size = PageSize::Page4K;
};

// Total bytes mapped when every entry is live: entries x page size.
std::uint64_t tlb_reach_bytes(const TlbConfig& cfg);
// Combined reach of several structures.
std::uint64_t tlb_reach_bytes(std::initializer_list<TlbConfig> cfgs);

struct TlbEntry {
  Asid asid = 0;
  std::uint64_t vpn = 0;
  std::uint64_t ppn = 0;
  PageSize size = PageSize::Page4K;
  std::uint64_t lru_stamp = 0;
};

// One LRU translation array. Exact LRU via per-set recency lists with an
// O(1) index over (asid, vpn); (asid, vpn, size) is unique per structure
// because the structure serves a single page size.
class Tlb {
 public:
  explicit Tlb(TlbConfig cfg);

  const TlbConfig& config() const { return cfg_; }

  // Hit refreshes recency and returns the entry.
  std::optional<TlbEntry> lookup(Asid asid, std::uint64_t vpn);
  // Hit test with no state change.
  bool contains(Asid asid, std::uint64_t vpn) const;

  // Returns the evicted victim when the target set was full.
  std::optional<TlbEntry> insert(Asid asid, std::uint64_t vpn,
                                 std::uint64_t ppn);

  std::size_t flush_asid(Asid asid);
  std::size_t flush_all();

  std::size_t live_entries() const { return index_.size(); }
  std::uint64_t lookups() const { return lookups_; }
  std::uint64_t hits() const { return hits_; }
  void reset_stats() { lookups_ = hits_ = 0; }

 private:
  using EntryList = std::list<TlbEntry>;  // MRU at front

  static std::uint64_t key_of(Asid asid, std::uint64_t vpn) {
    return (static_cast<std::uint64_t>(asid) << 40) ^ vpn;
  }
  std::size_t set_of(std::uint64_t vpn) const {
    return num_sets_ == 1 ? 0 : static_cast<std::size_t>(vpn) & (num_sets_ - 1);
  }

  TlbConfig cfg_;
  std::size_t num_sets_;
  std::size_t ways_;
  std::vector<EntryList> sets_;
  std::unordered_map<std::uint64_t, EntryList::iterator> index_;
  std::uint64_t stamp_ = 0;
  std::uint64_t lookups_ = 0;
  std::uint64_t hits_ = 0;
};

// Which structure serviced a lookup.
enum class TlbHitLevel : std::uint8_t { L1, Super, L2, Miss };

const char* tlb_hit_level_name(TlbHitLevel l);

struct TlbLookupResult {
  TlbHitLevel level = TlbHitLevel::Miss;
  std::uint64_t ppn = 0;
  PageSize size = PageSize::Page4K;
  std::uint32_t penalty_cycles = 0;  // nonzero only for L2 hits

  bool hit() const { return level != TlbHitLevel::Miss; }
};

struct TlbHierarchyConfig {
  TlbConfig l1i{"l1i_tlb", 64, 0, PageSize::Page4K};
  TlbConfig l1d{"l1d_tlb", 64, 0, PageSize::Page4K};
  TlbConfig l2{"l2_tlb", 1024, 0, PageSize::Page4K};
  TlbConfig superpage{"super_tlb", 32, 0, PageSize::Page2M};
  bool superpage_enabled = true;
  std::uint32_t l2_hit_penalty = 7;  // cycles charged on an L2 TLB hit
  bool flush_on_switch = false;      // shootdown emulation
};

enum class FlushScope : std::uint8_t { All, OneAsid };

// Split L1 I/D TLBs with a parallel superpage TLB, backed by a unified L2
// for 4KB pages. L2 hits promote into the missing L1 (inclusive design);
// superpage translations live only in the superpage TLB.
class TlbHierarchy {
 public:
  explicit TlbHierarchy(TlbHierarchyConfig cfg);

  const TlbHierarchyConfig& config() const { return cfg_; }

  // Probes {L1 by kind || superpage}, then L2. kind must not be Ptw.
  TlbLookupResult lookup(Asid asid, VirtualAddress va, AccessKind kind);

  // Installs an end-to-end translation after a walk; returns any victims.
  std::vector<TlbEntry> insert(Asid asid, VirtualAddress va, std::uint64_t ppn,
                               PageSize size, AccessKind kind);

  std::size_t flush(FlushScope scope, Asid asid = 0);

  Tlb& l1i() { return l1i_; }
  Tlb& l1d() { return l1d_; }
  Tlb& l2() { return l2_; }
  Tlb& superpage() { return super_; }
  const Tlb& l1i() const { return l1i_; }
  const Tlb& l1d() const { return l1d_; }
  const Tlb& l2() const { return l2_; }
  const Tlb& superpage() const { return super_; }

 private:
  TlbHierarchyConfig cfg_;
  Tlb l1i_;
  Tlb l1d_;
  Tlb l2_;
  Tlb super_;
};

}  // namespace mmusim
