// Test-side reference models, kept independent of the implementation paths
// they check.
#pragma once

#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

namespace oracles {

// Stack-distance model of a fully associative LRU array: an access hits
// iff the number of distinct keys touched since the last use is smaller
// than the capacity.
class LruStackOracle {
 public:
  explicit LruStackOracle(std::size_t capacity) : capacity_(capacity) {}

  bool access(std::uint64_t key);

  // Reuse distance of the last access (SIZE_MAX for a first touch).
  std::size_t last_distance() const { return last_distance_; }

 private:
  std::size_t capacity_;
  std::list<std::uint64_t> stack_;  // most recent first
  std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> pos_;
  std::size_t last_distance_ = 0;
};

// Independent radix decomposition: divides the virtual page number by the
// table fan-out instead of slicing bits.
struct SplitResult {
  std::vector<std::uint32_t> indices;  // root first
  std::uint64_t offset;
};
SplitResult split_by_division(std::uint64_t va, unsigned offset_bits,
                              unsigned levels);

// Enumerates the 2D nested-walk reference sequence for g guest levels over
// n nested levels and returns how many PTE reads it contains.
std::uint64_t enumerate_nested_refs(unsigned guest_levels,
                                    unsigned nested_levels);

}  // namespace oracles
