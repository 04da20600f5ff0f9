#include "mmusim/vmem.hpp"

#include <cstdio>
#include <stdexcept>

#include "mmusim/errors.hpp"
#include "mmusim/rng.hpp"

namespace mmusim {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

AddressSpace::AddressSpace(Asid asid, FrameAllocOptions opts, unsigned levels)
    : asid_(asid), levels_(levels), opts_(opts) {
  if (levels_ < 1 || levels_ > kMaxWalkLevels)
    throw std::invalid_argument("AddressSpace: levels must be in [1,4]");
  if (!is_pow2(opts_.window_frames))
    throw std::invalid_argument(
        "AddressSpace: window_frames must be a power of two");
  if (opts_.shuffle_seed != 0) {
    Rng rng(opts_.shuffle_seed);
    shuffle_mult_ = (rng.next() | 1) & (opts_.window_frames - 1);
    if (shuffle_mult_ == 0) shuffle_mult_ = 1;
    shuffle_xor_ = rng.next() & (opts_.window_frames - 1);
  }
  root_ = alloc_table_page();
}

std::uint64_t AddressSpace::alloc_frame() {
  if (cursor_ >= opts_.window_frames)
    throw std::runtime_error("AddressSpace: frame window exhausted");
  std::uint64_t slot = cursor_++;
  if (opts_.shuffle_seed != 0) {
    slot = ((slot * shuffle_mult_) ^ shuffle_xor_) & (opts_.window_frames - 1);
  }
  return opts_.base_frame + slot;
}

std::uint64_t AddressSpace::alloc_superpage_frame(PageSize size) {
  if (opts_.shuffle_seed != 0)
    throw std::invalid_argument(
        "AddressSpace: superpages need contiguous frames; disable the "
        "allocator shuffle");
  const std::uint64_t run = page_bytes(size) / kTablePageBytes;
  const std::uint64_t absolute = opts_.base_frame + cursor_;
  const std::uint64_t pad = (run - absolute % run) % run;
  const std::uint64_t first = cursor_ + pad;
  if (first + run > opts_.window_frames)
    throw std::runtime_error("AddressSpace: frame window exhausted");
  cursor_ = first + run;
  return (opts_.base_frame + first) / run;
}

std::uint64_t AddressSpace::alloc_table_page() {
  const std::uint64_t addr = alloc_frame() * kTablePageBytes;
  nodes_.emplace(addr, std::make_unique<TablePage>());
  return addr;
}

TablePage* AddressSpace::node(std::uint64_t table_addr) {
  auto it = nodes_.find(table_addr);
  return it == nodes_.end() ? nullptr : it->second.get();
}

const TablePage* AddressSpace::node(std::uint64_t table_addr) const {
  auto it = nodes_.find(table_addr);
  return it == nodes_.end() ? nullptr : it->second.get();
}

// Index into the table at tree depth `level` (0 = root). For a tree of
// depth L the leaf index sits just above the 4KB offset, so depth j uses
// bits [12 + 9*(L-1-j), 12 + 9*(L-j)).
static unsigned index_at(VirtualAddress va, unsigned tree_levels,
                         unsigned level) {
  const unsigned shift = 12 + kIndexBits * (tree_levels - 1 - level);
  return static_cast<unsigned>((va.low48() >> shift) & (kPtesPerTable - 1));
}

void AddressSpace::check_coverage(VirtualAddress va) const {
  if (levels_ == kMaxWalkLevels) return;
  const unsigned covered = 12 + kIndexBits * levels_;
  if ((va.low48() >> covered) != 0)
    throw PageFault("address " + hex(va.raw) + " outside the " +
                    std::to_string(levels_) + "-level tree's coverage");
}

WalkPath AddressSpace::map_page(VirtualAddress va, PageSize size) {
  check_coverage(va);
  const unsigned skipped = kMaxWalkLevels - walk_depth(size);
  if (levels_ != kMaxWalkLevels && size != PageSize::Page4K)
    throw std::invalid_argument(
        "AddressSpace: superpages need a full 4-level tree");
  if (skipped >= levels_)
    throw std::invalid_argument("AddressSpace: page size too large for tree");
  const unsigned depth = levels_ - skipped;

  std::uint64_t cur = root_;
  for (unsigned j = 0; j + 1 < depth; ++j) {
    PteRecord& e = node(cur)->entries[index_at(va, levels_, j)];
    if (e.present) {
      if (e.leaf)
        throw ConflictingMapping("map_page: " + hex(va.raw) +
                                 " inside existing " +
                                 page_size_name(e.size) + " leaf");
      cur = e.target;
    } else {
      const std::uint64_t child = alloc_table_page();
      e.present = true;
      e.leaf = false;
      e.target = child;
      cur = child;
    }
  }

  PteRecord& leaf = node(cur)->entries[index_at(va, levels_, depth - 1)];
  if (leaf.present) {
    if (!leaf.leaf || leaf.size != size)
      throw ConflictingMapping("map_page: " + hex(va.raw) +
                               " conflicts with existing mapping");
    return walk_path(va);  // idempotent
  }
  leaf.present = true;
  leaf.leaf = true;
  leaf.size = size;
  leaf.target = size == PageSize::Page4K ? alloc_frame()
                                         : alloc_superpage_frame(size);
  ++leaf_count_;
  return walk_path(va);
}

WalkPath AddressSpace::walk_path(VirtualAddress va) const {
  check_coverage(va);
  WalkPath path;
  std::uint64_t cur = root_;
  for (unsigned j = 0; j < levels_; ++j) {
    const unsigned idx = index_at(va, levels_, j);
    path.pte_addrs.push_back(cur + kPteBytes * idx);
    const PteRecord& e = node(cur)->entries[idx];
    if (!e.present)
      throw PageFault("walk_path: " + hex(va.raw) + " not mapped (level " +
                      std::to_string(levels_ - j) + ")");
    if (e.leaf) {
      path.ppn = e.target;
      path.size = e.size;
      return path;
    }
    cur = e.target;
  }
  throw PageFault("walk_path: " + hex(va.raw) + " has no leaf");
}

std::uint64_t AddressSpace::translate(VirtualAddress va) const {
  const WalkPath path = walk_path(va);
  return (path.ppn << offset_bits(path.size)) | va.page_offset(path.size);
}

bool AddressSpace::is_mapped(VirtualAddress va) const {
  if (levels_ != kMaxWalkLevels &&
      (va.low48() >> (12 + kIndexBits * levels_)) != 0)
    return false;
  std::uint64_t cur = root_;
  for (unsigned j = 0; j < levels_; ++j) {
    const PteRecord& e = node(cur)->entries[index_at(va, levels_, j)];
    if (!e.present) return false;
    if (e.leaf) return true;
    cur = e.target;
  }
  return false;
}

std::vector<std::uint64_t> AddressSpace::reachable_table_pages() const {
  std::vector<std::uint64_t> out;
  std::vector<std::uint64_t> stack{root_};
  while (!stack.empty()) {
    const std::uint64_t addr = stack.back();
    stack.pop_back();
    out.push_back(addr);
    const TablePage* page = node(addr);
    if (!page) continue;
    for (const PteRecord& e : page->entries) {
      if (e.present && !e.leaf) stack.push_back(e.target);
    }
  }
  return out;
}

}  // namespace mmusim
