#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "mmusim/types.hpp"
#include "mmusim/vaddr.hpp"

namespace mmusim {

// One 8-byte page-table entry. For interior entries `target` is the
// physical byte address of the child table page; for leaves it is the
// physical frame number of the mapped page.
struct PteRecord {
  bool present = false;
  bool leaf = false;
  PageSize size = PageSize::Page4K;  // meaningful for leaves only
  std::uint64_t target = 0;
};

struct TablePage {
  std::array<PteRecord, kPtesPerTable> entries{};
};

// The ordered physical locations a hardware walker must read to translate
// one address, root first, plus the resulting frame.
struct WalkPath {
  std::vector<std::uint64_t> pte_addrs;  // length == walk_depth(size)
  std::uint64_t ppn = 0;
  PageSize size = PageSize::Page4K;
};

// Physical frame placement policy. Frames come from a bump cursor inside a
// power-of-two window; a nonzero shuffle seed applies a bijective
// permutation to the cursor to emulate fragmented placement.
struct FrameAllocOptions {
  std::uint64_t base_frame = 256;            // first frame handed out
  std::uint64_t window_frames = 1ull << 24;  // 64 GiB of 4KB frames
  std::uint64_t shuffle_seed = 0;            // 0 = sequential
};

// One process-like address space: an ASID, a radix page table and the frame
// allocator feeding it. Table pages and data frames draw from the same
// allocator so page-table lines contend with data lines in the caches.
//
// `levels` selects the radix depth (4 = x86-64); shallower trees are used
// for the nested-paging dimension. Trees shallower than 4 map 4KB pages
// only.
class AddressSpace {
 public:
  explicit AddressSpace(Asid asid, FrameAllocOptions opts = {},
                        unsigned levels = kMaxWalkLevels);

  Asid asid() const { return asid_; }
  unsigned levels() const { return levels_; }
  std::uint64_t root() const { return root_; }

  // Creates the mapping (and any missing interior table pages) for `va`.
  // Idempotent for an already-mapped address; throws ConflictingMapping when
  // `va` falls inside an existing leaf of a different size.
  WalkPath map_page(VirtualAddress va, PageSize size = PageSize::Page4K);

  // Pure lookup of the walk locations for a mapped address; throws
  // PageFault when any level is absent.
  WalkPath walk_path(VirtualAddress va) const;

  // Full translation: frame shifted by the offset width, OR the offset.
  // Throws PageFault for unmapped addresses.
  std::uint64_t translate(VirtualAddress va) const;

  bool is_mapped(VirtualAddress va) const;

  // Allocator-cursor delta; counts both data frames and table pages.
  std::uint64_t frames_allocated() const { return cursor_; }
  std::uint64_t table_page_count() const { return nodes_.size(); }
  std::uint64_t mapped_leaf_count() const { return leaf_count_; }

  // Multiset of table-page physical addresses reachable from the root.
  std::vector<std::uint64_t> reachable_table_pages() const;

 private:
  std::uint64_t alloc_frame();
  // Contiguous aligned run for a superpage leaf; returns the leaf's frame
  // number at that page size. Incompatible with the shuffle option.
  std::uint64_t alloc_superpage_frame(PageSize size);
  std::uint64_t alloc_table_page();
  void check_coverage(VirtualAddress va) const;
  TablePage* node(std::uint64_t table_addr);
  const TablePage* node(std::uint64_t table_addr) const;

  Asid asid_;
  unsigned levels_;
  FrameAllocOptions opts_;
  std::uint64_t cursor_ = 0;
  std::uint64_t shuffle_mult_ = 1;
  std::uint64_t shuffle_xor_ = 0;
  std::uint64_t root_ = 0;
  std::uint64_t leaf_count_ = 0;
  std::unordered_map<std::uint64_t, std::unique_ptr<TablePage>> nodes_;
};

}  // namespace mmusim
