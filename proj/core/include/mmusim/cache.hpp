#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmusim/types.hpp"

namespace mmusim {

struct CacheConfig {
  std::string name;
  std::uint64_t size_bytes = 0;
  std::uint32_t associativity = 1;
  std::uint32_t block_bytes = 64;
  std::uint32_t latency_cycles = 1;
  bool writeback = true;

  std::uint64_t num_sets() const {
    return size_bytes / (static_cast<std::uint64_t>(associativity) *
                         block_bytes);
  }
};

// Throws InvalidGeometry unless size divides into associativity x block
// and block is a power of two.
void validate_geometry(const CacheConfig& cfg);

// Die-stacked L4 helper: flat-latency writeback cache, 64B or 512B blocks.
CacheConfig configure_l4(std::uint64_t size_bytes, std::uint32_t block_bytes,
                         std::uint32_t associativity = 16,
                         std::uint32_t latency_cycles = 20);

struct CacheStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t writebacks = 0;
};

struct AccessResult {
  MemLevel service = MemLevel::Mem;
  std::uint32_t cycles = 0;
  std::uint32_t dirty_evictions = 0;
};

// One set-associative writeback cache with exact LRU.
class Cache {
 public:
  explicit Cache(CacheConfig cfg);

  const CacheConfig& config() const { return cfg_; }

  // Tag probe. `touch` refreshes recency (false = pure peek).
  bool probe(std::uint64_t paddr, bool touch);
  // Installs the block; returns true when a dirty victim was written back.
  bool fill(std::uint64_t paddr);
  void mark_dirty(std::uint64_t paddr);
  bool contains(std::uint64_t paddr) const;

  const CacheStats& stats() const { return stats_; }
  void count_access(bool hit);
  void reset_stats() { stats_ = {}; }

  // Fold of all line state (tag/valid/dirty/recency); used to assert that
  // pollution-off walks leave the array untouched.
  std::uint64_t state_fingerprint() const;

 private:
  struct Line {
    std::uint64_t tag = 0;
    std::uint64_t stamp = 0;
    bool valid = false;
    bool dirty = false;
  };

  std::uint64_t block_of(std::uint64_t paddr) const {
    return paddr / cfg_.block_bytes;
  }
  std::size_t set_of(std::uint64_t block) const {
    return static_cast<std::size_t>(block & (num_sets_ - 1));
  }
  std::uint64_t tag_of(std::uint64_t block) const {
    return block >> set_shift_;
  }
  Line* find_line(std::uint64_t paddr);
  const Line* find_line(std::uint64_t paddr) const;

  CacheConfig cfg_;
  std::uint64_t num_sets_;
  std::uint32_t ways_;
  unsigned set_shift_;
  std::vector<Line> lines_;  // num_sets_ x ways_, row-major
  std::uint64_t stamp_ = 0;
  CacheStats stats_;
};

struct HierarchyConfig {
  CacheConfig l1i{"l1i", 32 * 1024, 4, 64, 2};
  CacheConfig l1d{"l1d", 32 * 1024, 8, 64, 4};
  CacheConfig l2{"l2", 256 * 1024, 8, 64, 6};
  // 4MB at 12 ways does not divide into power-of-two sets; the shared L3
  // keeps its size, block and 9-cycle latency at 16 ways.
  CacheConfig l3{"l3", 4 * 1024 * 1024, 16, 64, 9};
  std::optional<CacheConfig> l4 = configure_l4(256ull << 20, 64);
  std::uint32_t mem_latency_cycles = 195;  // 50ns at 3.9GHz
  bool ptw_from_l2 = false;       // walker policy: skip L1 for ptw refs
  bool ptw_pollution_off = false; // walker policy: ptw refs never allocate
};

struct KindStats {
  std::uint64_t accesses = 0;
  std::uint64_t hits = 0;  // serviced above main memory
};

struct HierarchySnapshot {
  std::vector<std::pair<std::string, CacheStats>> levels;
  std::array<KindStats, 3> by_kind{};  // indexed by AccessKind
  std::uint64_t mem_accesses = 0;
};

// L1I/L1D/L2/L3/L4 stack over flat-latency main memory. Non-inclusive;
// a miss fills the block into every level that was probed.
class CacheHierarchy {
 public:
  explicit CacheHierarchy(HierarchyConfig cfg);

  const HierarchyConfig& config() const { return cfg_; }
  bool has_l4() const { return l4_.has_value(); }

  AccessResult access(std::uint64_t paddr, AccessKind kind, AccessType type);

  HierarchySnapshot snapshot() const;
  void reset_stats();

  std::uint64_t state_fingerprint() const;

  Cache& level(MemLevel l, AccessKind kind = AccessKind::Data);

 private:
  HierarchyConfig cfg_;
  Cache l1i_;
  Cache l1d_;
  Cache l2_;
  Cache l3_;
  std::optional<Cache> l4_;
  std::array<KindStats, 3> by_kind_{};
  std::uint64_t mem_accesses_ = 0;
};

}  // namespace mmusim
