#pragma once

#include <array>
#include <cstdint>
#include <list>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mmusim/cache.hpp"
#include "mmusim/types.hpp"
#include "mmusim/vmem.hpp"

namespace mmusim {

// Paging-structure cache configuration. Only non-leaf pointers are cached:
// the PL4, PL3 and PL2 entries that point at the next table page.
struct PwcConfig {
  bool enabled = false;
  std::array<std::uint32_t, 3> entries_per_level{16, 16, 16};  // PL4, PL3, PL2
  std::uint32_t latency_cycles = 1;  // charged once per probed walk
};

struct PwcHit {
  WalkLevel level;           // pointer level that matched
  std::uint64_t table_base;  // physical base of the next table page
};

// Per-level fully associative LRU arrays keyed by (asid, index prefix).
// A pointer at level PLk maps the first (5-k) indices to the base of the
// PL(k-1) table, letting the walk resume one level below it.
class PageWalkCache {
 public:
  explicit PageWalkCache(PwcConfig cfg);

  const PwcConfig& config() const { return cfg_; }

  // Deepest cached pointer usable for a walk of `depth` levels.
  std::optional<PwcHit> access(Asid asid, const AddressParts& parts,
                               unsigned depth);

  // Installs the non-leaf pointers discovered by a completed walk.
  void fill(Asid asid, const AddressParts& parts, const WalkPath& path);

  void flush();
  std::uint64_t probes() const { return probes_; }
  std::uint64_t hits() const { return hits_; }

 private:
  struct Slot {
    std::uint64_t key;
    std::uint64_t table_base;
  };
  using SlotList = std::list<Slot>;

  static std::uint64_t key_of(Asid asid, const AddressParts& parts,
                              unsigned prefix_len);
  std::optional<std::uint64_t> level_lookup(unsigned li, std::uint64_t key);
  void level_insert(unsigned li, std::uint64_t key, std::uint64_t base);

  PwcConfig cfg_;
  std::array<SlotList, 3> lists_;  // MRU front; [0]=PL4, [1]=PL3, [2]=PL2
  std::array<std::unordered_map<std::uint64_t, SlotList::iterator>, 3> index_;
  std::uint64_t probes_ = 0;
  std::uint64_t hits_ = 0;
};

struct NestedConfig {
  bool enabled = false;
  unsigned guest_levels = 4;
  unsigned nested_levels = 4;
};

struct WalkRef {
  WalkLevel level;
  MemLevel service;
  std::uint32_t cycles;
  std::uint64_t pte_addr;
};

// Outcome of one hardware walk: where each PTE read was serviced and the
// cycles the walk accrued (cache reference costs plus the PWC probe).
struct WalkResult {
  std::uint32_t latency_cycles = 0;
  std::vector<WalkRef> refs;
  std::uint32_t skipped_levels = 0;
  std::uint64_t ppn = 0;
  PageSize size = PageSize::Page4K;
};

// Closed form of the 2D walk reference count: (g + 1) * n + g guest and
// nested PTE reads for g guest levels over n nested levels; g when
// virtualization is off.
std::uint64_t nested_ref_count(unsigned guest_levels, unsigned nested_levels);

// Hardware page-table walker. PTE reads are issued through the cache
// hierarchy with kind=ptw, root first; the PWC shortens native walks.
class Walker {
 public:
  explicit Walker(PwcConfig pwc = {}, NestedConfig nested = {});

  WalkResult walk(const AddressSpace& aspace, VirtualAddress va,
                  CacheHierarchy& hier);

  // 2D walk: interleaves nested translations of each guest table address
  // (and of the final data address) with the guest PTE reads. No PWC
  // shortening is applied to either dimension.
  WalkResult nested_walk(const AddressSpace& guest, const AddressSpace& nested,
                         VirtualAddress gva, CacheHierarchy& hier);

  // Maps `gva` in the guest and every guest-physical page the 2D walk will
  // touch (guest table pages and the data page) in the nested space.
  static void ensure_nested_mapped(AddressSpace& guest, AddressSpace& nested,
                                   VirtualAddress gva);

  PageWalkCache& pwc() { return pwc_; }
  const NestedConfig& nested_config() const { return nested_cfg_; }
  std::uint64_t walk_count() const { return walks_; }

 private:
  WalkRef issue(CacheHierarchy& hier, std::uint64_t pte_addr, WalkLevel level);

  PageWalkCache pwc_;
  NestedConfig nested_cfg_;
  std::uint64_t walks_ = 0;
};

}  // namespace mmusim
