#pragma once

#include <cstdint>

namespace mmusim {

// x86-64 radix paging geometry: 48-bit virtual addresses, four 9-bit
// indices over 8-byte entries, 512 entries per 4KB table page.
inline constexpr unsigned kVaBits = 48;
inline constexpr unsigned kIndexBits = 9;
inline constexpr unsigned kPteBytes = 8;
inline constexpr unsigned kPtesPerTable = 512;
inline constexpr unsigned kTablePageBytes = 4096;
inline constexpr unsigned kMaxWalkLevels = 4;
inline constexpr std::uint64_t kVaMask = (std::uint64_t{1} << kVaBits) - 1;

enum class PageSize : std::uint8_t { Page4K, Page2M, Page1G };

constexpr unsigned offset_bits(PageSize s) {
  switch (s) {
    case PageSize::Page4K: return 12;
    case PageSize::Page2M: return 21;
    case PageSize::Page1G: return 30;
  }
  return 12;
}

constexpr std::uint64_t page_bytes(PageSize s) {
  return std::uint64_t{1} << offset_bits(s);
}

// A 2MB leaf terminates the walk one level early, a 1GB leaf two levels.
constexpr unsigned walk_depth(PageSize s) {
  switch (s) {
    case PageSize::Page4K: return 4;
    case PageSize::Page2M: return 3;
    case PageSize::Page1G: return 2;
  }
  return 4;
}

const char* page_size_name(PageSize s);

enum class AccessKind : std::uint8_t { Instruction, Data, Ptw };
enum class AccessType : std::uint8_t { Read, Write };

// Service points in the memory stack, probe order L1 -> L2 -> L3 -> L4 -> Mem.
enum class MemLevel : std::uint8_t { L1 = 0, L2, L3, L4, Mem };
inline constexpr unsigned kMemLevels = 5;

const char* mem_level_name(MemLevel l);

// Page-table levels, root first: PL4 (PML4) down to PL1 (PT).
enum class WalkLevel : std::uint8_t { PL1 = 1, PL2 = 2, PL3 = 3, PL4 = 4 };

const char* walk_level_name(WalkLevel l);

using Asid = std::uint32_t;

}  // namespace mmusim
