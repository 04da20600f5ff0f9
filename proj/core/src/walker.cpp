#include "mmusim/walker.hpp"

#include <stdexcept>

#include "mmusim/errors.hpp"
#include "mmusim/vaddr.hpp"

namespace mmusim {

PageWalkCache::PageWalkCache(PwcConfig cfg) : cfg_(cfg) {}

std::uint64_t PageWalkCache::key_of(Asid asid, const AddressParts& parts,
                                    unsigned prefix_len) {
  std::uint64_t packed = 0;
  for (unsigned i = 0; i < prefix_len; ++i) {
    packed |= static_cast<std::uint64_t>(parts.index[i]) << (kIndexBits * i);
  }
  return (static_cast<std::uint64_t>(asid) << 32) | packed;
}

std::optional<std::uint64_t> PageWalkCache::level_lookup(unsigned li,
                                                         std::uint64_t key) {
  auto it = index_[li].find(key);
  if (it == index_[li].end()) return std::nullopt;
  lists_[li].splice(lists_[li].begin(), lists_[li], it->second);
  return it->second->table_base;
}

void PageWalkCache::level_insert(unsigned li, std::uint64_t key,
                                 std::uint64_t base) {
  auto it = index_[li].find(key);
  if (it != index_[li].end()) {
    it->second->table_base = base;
    lists_[li].splice(lists_[li].begin(), lists_[li], it->second);
    return;
  }
  if (cfg_.entries_per_level[li] == 0) return;
  if (lists_[li].size() >= cfg_.entries_per_level[li]) {
    index_[li].erase(lists_[li].back().key);
    lists_[li].pop_back();
  }
  lists_[li].push_front(Slot{key, base});
  index_[li][key] = lists_[li].begin();
}

std::optional<PwcHit> PageWalkCache::access(Asid asid,
                                            const AddressParts& parts,
                                            unsigned depth) {
  if (!cfg_.enabled) return std::nullopt;
  ++probes_;
  // Pointer level k resumes the walk at level k-1, so a walk of `depth`
  // levels can use pointers down to level 6-depth. Deepest prefix first.
  const unsigned k_min = depth >= 4 ? 2 : 6 - depth;
  for (unsigned k = k_min; k <= 4; ++k) {
    const unsigned prefix_len = 5 - k;  // PL4 ptr keyed by 1 index, PL2 by 3
    auto base = level_lookup(4 - k, key_of(asid, parts, prefix_len));
    if (base) {
      ++hits_;
      return PwcHit{static_cast<WalkLevel>(k), *base};
    }
  }
  return std::nullopt;
}

void PageWalkCache::fill(Asid asid, const AddressParts& parts,
                         const WalkPath& path) {
  if (!cfg_.enabled) return;
  const unsigned depth = static_cast<unsigned>(path.pte_addrs.size());
  // The level-k entry points at the table page holding the next read.
  for (unsigned k = 4; k >= 2 && k + depth >= 6; --k) {
    const unsigned next_read = (4 - k) + 1;
    if (next_read >= depth) break;
    const std::uint64_t table_base =
        path.pte_addrs[next_read] & ~static_cast<std::uint64_t>(
                                        kTablePageBytes - 1);
    level_insert(4 - k, key_of(asid, parts, 5 - k), table_base);
  }
}

void PageWalkCache::flush() {
  for (auto& l : lists_) l.clear();
  for (auto& m : index_) m.clear();
}

std::uint64_t nested_ref_count(unsigned guest_levels, unsigned nested_levels) {
  if (guest_levels < 1)
    throw std::invalid_argument("nested_ref_count: guest_levels must be >= 1");
  if (nested_levels == 0) return guest_levels;
  return static_cast<std::uint64_t>(guest_levels + 1) * nested_levels +
         guest_levels;
}

Walker::Walker(PwcConfig pwc, NestedConfig nested)
    : pwc_(pwc), nested_cfg_(nested) {}

WalkRef Walker::issue(CacheHierarchy& hier, std::uint64_t pte_addr,
                      WalkLevel level) {
  const AccessResult r = hier.access(pte_addr, AccessKind::Ptw,
                                     AccessType::Read);
  return WalkRef{level, r.service, r.cycles, pte_addr};
}

WalkResult Walker::walk(const AddressSpace& aspace, VirtualAddress va,
                        CacheHierarchy& hier) {
  const WalkPath path = aspace.walk_path(va);
  const unsigned depth = static_cast<unsigned>(path.pte_addrs.size());
  const unsigned top = aspace.levels();

  WalkResult result;
  result.ppn = path.ppn;
  result.size = path.size;

  unsigned first_ref = 0;
  const bool use_pwc = pwc_.config().enabled && top == kMaxWalkLevels;
  if (use_pwc) {
    result.latency_cycles += pwc_.config().latency_cycles;
    const AddressParts parts = split_address(va, path.size);
    if (auto hit = pwc_.access(aspace.asid(), parts, depth)) {
      first_ref = 5 - static_cast<unsigned>(hit->level);
      result.skipped_levels = first_ref;
    }
  }

  for (unsigned i = first_ref; i < depth; ++i) {
    const WalkRef ref =
        issue(hier, path.pte_addrs[i], static_cast<WalkLevel>(top - i));
    result.latency_cycles += ref.cycles;
    result.refs.push_back(ref);
  }

  if (use_pwc) pwc_.fill(aspace.asid(), split_address(va, path.size), path);
  ++walks_;
  return result;
}

WalkResult Walker::nested_walk(const AddressSpace& guest,
                               const AddressSpace& nested, VirtualAddress gva,
                               CacheHierarchy& hier) {
  WalkResult result;

  // Full nPT walk of one guest-physical address; returns the system
  // physical address.
  auto nested_xlate = [&](std::uint64_t gpa) -> std::uint64_t {
    const WalkPath npath = nested.walk_path(VirtualAddress{gpa});
    for (unsigned i = 0; i < npath.pte_addrs.size(); ++i) {
      const WalkRef ref =
          issue(hier, npath.pte_addrs[i],
                static_cast<WalkLevel>(nested.levels() - i));
      result.latency_cycles += ref.cycles;
      result.refs.push_back(ref);
    }
    return (npath.ppn << offset_bits(npath.size)) |
           (gpa & (page_bytes(npath.size) - 1));
  };

  const WalkPath gpath = guest.walk_path(gva);
  const unsigned g = static_cast<unsigned>(gpath.pte_addrs.size());

  // Each guest PTE read needs its table's gPA translated first; the final
  // data gPA is translated after the last guest level.
  for (unsigned i = 0; i < g; ++i) {
    const std::uint64_t pte_spa = nested_xlate(gpath.pte_addrs[i]);
    const WalkRef ref =
        issue(hier, pte_spa, static_cast<WalkLevel>(guest.levels() - i));
    result.latency_cycles += ref.cycles;
    result.refs.push_back(ref);
  }
  const std::uint64_t data_gpa =
      (gpath.ppn << offset_bits(gpath.size)) | gva.page_offset(gpath.size);
  const std::uint64_t data_spa = nested_xlate(data_gpa);

  result.ppn = data_spa >> offset_bits(PageSize::Page4K);
  result.size = gpath.size;
  ++walks_;
  return result;
}

void Walker::ensure_nested_mapped(AddressSpace& guest, AddressSpace& nested,
                                  VirtualAddress gva) {
  if (!guest.is_mapped(gva)) guest.map_page(gva, PageSize::Page4K);
  const WalkPath gpath = guest.walk_path(gva);
  auto map_gpa = [&nested](std::uint64_t gpa) {
    const VirtualAddress page{gpa & ~static_cast<std::uint64_t>(
                                        kTablePageBytes - 1)};
    if (!nested.is_mapped(page)) nested.map_page(page, PageSize::Page4K);
  };
  for (const std::uint64_t pte_addr : gpath.pte_addrs) map_gpa(pte_addr);
  map_gpa(gpath.ppn << offset_bits(gpath.size));
}

}  // namespace mmusim
