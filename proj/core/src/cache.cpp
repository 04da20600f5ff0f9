#include "mmusim/cache.hpp"

#include <stdexcept>

#include "mmusim/errors.hpp"

namespace mmusim {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

unsigned log2_floor(std::uint64_t v) {
  unsigned n = 0;
  while (v >>= 1) ++n;
  return n;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void validate_geometry(const CacheConfig& cfg) {
  if (!is_pow2(cfg.block_bytes))
    throw InvalidGeometry(cfg.name + ": block size " +
                          std::to_string(cfg.block_bytes) +
                          " is not a power of two");
  if (cfg.associativity == 0)
    throw InvalidGeometry(cfg.name + ": zero associativity");
  const std::uint64_t line_capacity =
      static_cast<std::uint64_t>(cfg.associativity) * cfg.block_bytes;
  if (cfg.size_bytes == 0 || cfg.size_bytes % line_capacity != 0)
    throw InvalidGeometry(cfg.name + ": size " +
                          std::to_string(cfg.size_bytes) +
                          " not divisible by associativity x block");
  if (!is_pow2(cfg.num_sets()))
    throw InvalidGeometry(cfg.name + ": set count " +
                          std::to_string(cfg.num_sets()) +
                          " is not a power of two");
}

CacheConfig configure_l4(std::uint64_t size_bytes, std::uint32_t block_bytes,
                         std::uint32_t associativity,
                         std::uint32_t latency_cycles) {
  if (block_bytes != 64 && block_bytes != 512)
    throw InvalidGeometry("l4: block size must be 64 or 512 bytes");
  CacheConfig cfg{"l4", size_bytes, associativity, block_bytes,
                  latency_cycles, true};
  validate_geometry(cfg);
  return cfg;
}

Cache::Cache(CacheConfig cfg) : cfg_(std::move(cfg)) {
  validate_geometry(cfg_);
  num_sets_ = cfg_.num_sets();
  ways_ = cfg_.associativity;
  set_shift_ = log2_floor(num_sets_);
  lines_.resize(num_sets_ * ways_);
}

Cache::Line* Cache::find_line(std::uint64_t paddr) {
  const std::uint64_t block = block_of(paddr);
  const std::uint64_t tag = tag_of(block);
  Line* set = &lines_[set_of(block) * ways_];
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (set[w].valid && set[w].tag == tag) return &set[w];
  }
  return nullptr;
}

const Cache::Line* Cache::find_line(std::uint64_t paddr) const {
  return const_cast<Cache*>(this)->find_line(paddr);
}

bool Cache::probe(std::uint64_t paddr, bool touch) {
  Line* line = find_line(paddr);
  if (!line) return false;
  if (touch) line->stamp = ++stamp_;
  return true;
}

bool Cache::fill(std::uint64_t paddr) {
  const std::uint64_t block = block_of(paddr);
  const std::uint64_t tag = tag_of(block);
  Line* set = &lines_[set_of(block) * ways_];
  Line* victim = nullptr;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    if (set[w].valid && set[w].tag == tag) {
      set[w].stamp = ++stamp_;
      return false;  // already resident
    }
    if (!set[w].valid) {
      if (!victim || victim->valid) victim = &set[w];
    } else if (!victim || (victim->valid && set[w].stamp < victim->stamp)) {
      victim = &set[w];
    }
  }
  const bool dirty_victim = victim->valid && victim->dirty;
  if (dirty_victim) ++stats_.writebacks;
  *victim = Line{tag, ++stamp_, true, false};
  return dirty_victim;
}

void Cache::mark_dirty(std::uint64_t paddr) {
  if (Line* line = find_line(paddr)) line->dirty = cfg_.writeback;
}

bool Cache::contains(std::uint64_t paddr) const {
  return find_line(paddr) != nullptr;
}

void Cache::count_access(bool hit) {
  ++stats_.accesses;
  if (hit)
    ++stats_.hits;
  else
    ++stats_.misses;
}

std::uint64_t Cache::state_fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const Line& line : lines_) {
    if (!line.valid) {
      h = fnv1a(h, 0);
      continue;
    }
    h = fnv1a(h, line.tag);
    h = fnv1a(h, line.stamp);
    h = fnv1a(h, line.dirty ? 3 : 1);
  }
  return h;
}

CacheHierarchy::CacheHierarchy(HierarchyConfig cfg)
    : cfg_(std::move(cfg)),
      l1i_(cfg_.l1i),
      l1d_(cfg_.l1d),
      l2_(cfg_.l2),
      l3_(cfg_.l3) {
  if (cfg_.l4) l4_.emplace(*cfg_.l4);
}

Cache& CacheHierarchy::level(MemLevel l, AccessKind kind) {
  switch (l) {
    case MemLevel::L1:
      return kind == AccessKind::Instruction ? l1i_ : l1d_;
    case MemLevel::L2: return l2_;
    case MemLevel::L3: return l3_;
    case MemLevel::L4:
      if (l4_) return *l4_;
      break;
    case MemLevel::Mem: break;
  }
  throw std::invalid_argument("CacheHierarchy::level: no such level");
}

AccessResult CacheHierarchy::access(std::uint64_t paddr, AccessKind kind,
                                    AccessType type) {
  // Instruction refs probe the L1I; data and page-walk refs the L1D.
  Cache* probe_order[4] = {kind == AccessKind::Instruction ? &l1i_ : &l1d_,
                           &l2_, &l3_, l4_ ? &*l4_ : nullptr};
  const MemLevel level_ids[4] = {MemLevel::L1, MemLevel::L2, MemLevel::L3,
                                 MemLevel::L4};
  const bool pure = kind == AccessKind::Ptw && cfg_.ptw_pollution_off;
  const unsigned first =
      (kind == AccessKind::Ptw && cfg_.ptw_from_l2) ? 1 : 0;

  AccessResult result;
  result.service = MemLevel::Mem;
  int hit_at = -1;
  for (unsigned i = first; i < 4; ++i) {
    Cache* c = probe_order[i];
    if (!c) continue;
    result.cycles += c->config().latency_cycles;
    const bool hit = c->probe(paddr, !pure);
    if (!pure) c->count_access(hit);
    if (hit) {
      result.service = level_ids[i];
      hit_at = static_cast<int>(i);
      break;
    }
  }
  if (result.service == MemLevel::Mem) {
    result.cycles += cfg_.mem_latency_cycles;
    if (!pure) ++mem_accesses_;
    hit_at = 4;
  }

  if (!pure) {
    // Allocate-on-fill into every level that was probed and missed.
    for (unsigned i = first; i < static_cast<unsigned>(hit_at); ++i) {
      Cache* c = probe_order[i];
      if (!c) continue;
      if (c->fill(paddr)) ++result.dirty_evictions;
    }
    if (type == AccessType::Write) {
      // Write-allocate: the nearest probed level now holds the block.
      for (unsigned i = first; i < 4; ++i) {
        if (probe_order[i]) {
          probe_order[i]->mark_dirty(paddr);
          break;
        }
      }
    }
    KindStats& ks = by_kind_[static_cast<unsigned>(kind)];
    ++ks.accesses;
    if (result.service != MemLevel::Mem) ++ks.hits;
  }
  return result;
}

HierarchySnapshot CacheHierarchy::snapshot() const {
  HierarchySnapshot snap;
  snap.levels.emplace_back(l1i_.config().name, l1i_.stats());
  snap.levels.emplace_back(l1d_.config().name, l1d_.stats());
  snap.levels.emplace_back(l2_.config().name, l2_.stats());
  snap.levels.emplace_back(l3_.config().name, l3_.stats());
  if (l4_) snap.levels.emplace_back(l4_->config().name, l4_->stats());
  snap.by_kind = by_kind_;
  snap.mem_accesses = mem_accesses_;
  return snap;
}

void CacheHierarchy::reset_stats() {
  l1i_.reset_stats();
  l1d_.reset_stats();
  l2_.reset_stats();
  l3_.reset_stats();
  if (l4_) l4_->reset_stats();
  by_kind_ = {};
  mem_accesses_ = 0;
}

std::uint64_t CacheHierarchy::state_fingerprint() const {
  std::uint64_t h = l1i_.state_fingerprint();
  h ^= l1d_.state_fingerprint() * 0x9e3779b97f4a7c15ull;
  h ^= l2_.state_fingerprint() * 0xc2b2ae3d27d4eb4full;
  h ^= l3_.state_fingerprint() * 0x165667b19e3779f9ull;
  if (l4_) h ^= l4_->state_fingerprint() * 0x27d4eb2f165667c5ull;
  return h;
}

}  // namespace mmusim
