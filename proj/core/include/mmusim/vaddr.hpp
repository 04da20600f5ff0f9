#pragma once

#include <array>
#include <cstdint>

#include "mmusim/types.hpp"

namespace mmusim {

// 48-bit virtual address. Bits 48-63 are carried but ignored by
// decomposition; canonicality is not enforced.
struct VirtualAddress {
  std::uint64_t raw = 0;

  constexpr VirtualAddress() = default;
  constexpr explicit VirtualAddress(std::uint64_t r) : raw(r) {}

  constexpr std::uint64_t low48() const { return raw & kVaMask; }
  constexpr std::uint64_t vpn(PageSize s) const {
    return low48() >> offset_bits(s);
  }
  constexpr std::uint64_t page_offset(PageSize s) const {
    return low48() & (page_bytes(s) - 1);
  }

  friend constexpr bool operator==(VirtualAddress a, VirtualAddress b) {
    return a.raw == b.raw;
  }
};

// Radix decomposition of a virtual address: index[0] is the PL4 index
// (bits 47-39), descending one level per slot until the offset begins.
struct AddressParts {
  std::array<std::uint16_t, kMaxWalkLevels> index{};  // only [0, levels) valid
  unsigned levels = 0;
  std::uint64_t offset = 0;
};

AddressParts split_address(VirtualAddress va, PageSize size);

// Inverse of split_address over the low 48 bits.
VirtualAddress join_address(const AddressParts& parts, PageSize size);

}  // namespace mmusim
