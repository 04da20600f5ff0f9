#include "mmusim/vaddr.hpp"

namespace mmusim {

const char* page_size_name(PageSize s) {
  switch (s) {
    case PageSize::Page4K: return "4K";
    case PageSize::Page2M: return "2M";
    case PageSize::Page1G: return "1G";
  }
  return "?";
}

const char* mem_level_name(MemLevel l) {
  switch (l) {
    case MemLevel::L1: return "L1";
    case MemLevel::L2: return "L2";
    case MemLevel::L3: return "L3";
    case MemLevel::L4: return "L4";
    case MemLevel::Mem: return "MEM";
  }
  return "?";
}

const char* walk_level_name(WalkLevel l) {
  switch (l) {
    case WalkLevel::PL4: return "PL4";
    case WalkLevel::PL3: return "PL3";
    case WalkLevel::PL2: return "PL2";
    case WalkLevel::PL1: return "PL1";
  }
  return "?";
}

AddressParts split_address(VirtualAddress va, PageSize size) {
  AddressParts parts;
  parts.levels = walk_depth(size);
  const std::uint64_t low = va.low48();
  for (unsigned i = 0; i < parts.levels; ++i) {
    const unsigned shift = kVaBits - kIndexBits * (i + 1);
    parts.index[i] =
        static_cast<std::uint16_t>((low >> shift) & (kPtesPerTable - 1));
  }
  parts.offset = low & (page_bytes(size) - 1);
  return parts;
}

VirtualAddress join_address(const AddressParts& parts, PageSize size) {
  std::uint64_t raw = 0;
  for (unsigned i = 0; i < parts.levels; ++i) {
    const unsigned shift = kVaBits - kIndexBits * (i + 1);
    raw |= static_cast<std::uint64_t>(parts.index[i] & (kPtesPerTable - 1))
           << shift;
  }
  raw |= parts.offset & (page_bytes(size) - 1);
  return VirtualAddress{raw};
}

}  // namespace mmusim
