#include <algorithm>
#include <set>
#include <unordered_set>

#include "doctest.h"
#include "mmusim/errors.hpp"
#include "mmusim/rng.hpp"
#include "mmusim/vmem.hpp"

using namespace mmusim;

TEST_CASE("map then translate succeeds") {
  AddressSpace aspace(0);
  aspace.map_page(VirtualAddress{0x1000});
  CHECK_NOTHROW(aspace.translate(VirtualAddress{0x1000}));
  CHECK(aspace.is_mapped(VirtualAddress{0x1000}));
}

TEST_CASE("translate of an unmapped address faults") {
  AddressSpace aspace(0);
  CHECK_THROWS_AS(aspace.translate(VirtualAddress{0xdead000}), PageFault);
  CHECK_THROWS_AS(aspace.walk_path(VirtualAddress{0xdead000}), PageFault);
}

TEST_CASE("translation concatenates frame and offset") {
  AddressSpace aspace(0);
  const WalkPath path = aspace.map_page(VirtualAddress{0});
  const std::uint64_t frame = path.ppn;
  CHECK(aspace.translate(VirtualAddress{0x0ABC}) == ((frame << 12) | 0xABC));
}

TEST_CASE("2MB translation is offset arithmetic from the base") {
  AddressSpace aspace(0);
  const std::uint64_t base_va = 0x40000000;  // 2MB aligned
  const WalkPath path =
      aspace.map_page(VirtualAddress{base_va}, PageSize::Page2M);
  const std::uint64_t base_pa = path.ppn << 21;
  // Independent oracle: physical = base + (va - base_va).
  for (std::uint64_t delta : {0x0ull, 0x12345ull, 0x1FFFFFull}) {
    CHECK(aspace.translate(VirtualAddress{base_va + delta}) ==
          base_pa + delta);
  }
}

TEST_CASE("superpage walks are shorter") {
  AddressSpace aspace(0);
  const WalkPath two_meg =
      aspace.map_page(VirtualAddress{0x200000}, PageSize::Page2M);
  CHECK(two_meg.pte_addrs.size() == 3);
  CHECK(two_meg.size == PageSize::Page2M);

  const WalkPath four_k = aspace.map_page(VirtualAddress{0x1000});
  CHECK(four_k.pte_addrs.size() == 4);

  AddressSpace giant(1);
  const WalkPath one_gig =
      giant.map_page(VirtualAddress{0x40000000}, PageSize::Page1G);
  CHECK(one_gig.pte_addrs.size() == 2);
}

TEST_CASE("PTE addresses are 8-byte slots in their table page") {
  AddressSpace aspace(0);
  const auto path = aspace.map_page(VirtualAddress{0x0000'0080'0040'3012ull});
  const auto parts = split_address(VirtualAddress{0x0000'0080'0040'3012ull},
                                   PageSize::Page4K);
  REQUIRE(path.pte_addrs.size() == 4);
  for (unsigned i = 0; i < 4; ++i) {
    CHECK(path.pte_addrs[i] % kPteBytes == 0);
    CHECK(path.pte_addrs[i] % kTablePageBytes ==
          parts.index[i] * std::uint64_t{kPteBytes});
  }
}

TEST_CASE("same page yields the identical walk path") {
  AddressSpace aspace(0);
  aspace.map_page(VirtualAddress{0x7000});
  const auto a = aspace.walk_path(VirtualAddress{0x7000});
  const auto b = aspace.walk_path(VirtualAddress{0x7FFF});
  CHECK(a.pte_addrs == b.pte_addrs);
  CHECK(a.ppn == b.ppn);
}

TEST_CASE("map_page is idempotent and walk_path is pure") {
  AddressSpace aspace(0);
  const auto first = aspace.map_page(VirtualAddress{0x5000});
  const std::uint64_t frames = aspace.frames_allocated();
  const auto second = aspace.map_page(VirtualAddress{0x5000});
  CHECK(first.pte_addrs == second.pte_addrs);
  CHECK(first.ppn == second.ppn);
  CHECK(aspace.frames_allocated() == frames);
  aspace.walk_path(VirtualAddress{0x5000});
  CHECK(aspace.frames_allocated() == frames);
}

TEST_CASE("neighbouring pages share interior table pages") {
  AddressSpace aspace(0);
  aspace.map_page(VirtualAddress{0x1000});
  const std::uint64_t after_first = aspace.frames_allocated();
  // Shares PL4/PL3/PL2 indices, differs only at PL1.
  aspace.map_page(VirtualAddress{0x2000});
  // Only the data frame is new: exactly one allocation.
  CHECK(aspace.frames_allocated() == after_first + 1);
}

TEST_CASE("conflicting page sizes are rejected") {
  AddressSpace aspace(0);
  aspace.map_page(VirtualAddress{0x200000}, PageSize::Page2M);
  CHECK_THROWS_AS(aspace.map_page(VirtualAddress{0x200000 + 0x1000},
                                  PageSize::Page4K),
                  ConflictingMapping);

  AddressSpace other(1);
  other.map_page(VirtualAddress{0x200000}, PageSize::Page4K);
  CHECK_THROWS_AS(other.map_page(VirtualAddress{0x200000}, PageSize::Page2M),
                  ConflictingMapping);
}

TEST_CASE("tree property: reachable table pages equal the node registry") {
  AddressSpace aspace(0);
  Rng rng(99);
  for (int i = 0; i < 400; ++i) {
    aspace.map_page(VirtualAddress{(rng.next() & kVaMask) & ~0xFFFull});
  }
  auto reachable = aspace.reachable_table_pages();
  std::set<std::uint64_t> unique(reachable.begin(), reachable.end());
  CHECK(unique.size() == reachable.size());  // no cycles, no sharing
  CHECK(unique.size() == aspace.table_page_count());
}

TEST_CASE("fan-out monotonicity of distinct PTE lines") {
  AddressSpace aspace(0);
  Rng rng(123);
  std::array<std::unordered_set<std::uint64_t>, 4> lines;
  for (int i = 0; i < 3000; ++i) {
    const VirtualAddress va{rng.next() & kVaMask & ~0xFFFull};
    const auto path = aspace.map_page(va);
    for (unsigned level = 0; level < 4; ++level)
      lines[level].insert(path.pte_addrs[level] / 64);
  }
  CHECK(lines[0].size() <= lines[1].size());
  CHECK(lines[1].size() <= lines[2].size());
  CHECK(lines[2].size() <= lines[3].size());
}

TEST_CASE("shuffled allocator stays collision free and deterministic") {
  FrameAllocOptions opts;
  opts.shuffle_seed = 7;
  opts.window_frames = 1 << 16;
  AddressSpace a(0, opts);
  AddressSpace b(0, opts);
  std::unordered_set<std::uint64_t> frames;
  for (int i = 0; i < 2000; ++i) {
    const VirtualAddress va{static_cast<std::uint64_t>(i) << 12};
    const auto pa = a.map_page(va);
    const auto pb = b.map_page(va);
    CHECK(pa.ppn == pb.ppn);  // same seed, same placement
    CHECK(frames.insert(pa.ppn).second);
  }
  // Shuffled placement must differ from the sequential one.
  AddressSpace seq(0);
  bool any_different = false;
  for (int i = 0; i < 64; ++i) {
    const VirtualAddress va{static_cast<std::uint64_t>(i) << 12};
    if (seq.map_page(va).ppn != a.walk_path(va).ppn) any_different = true;
  }
  CHECK(any_different);
}

TEST_CASE("distinct address spaces never share frames") {
  FrameAllocOptions opts_a;
  FrameAllocOptions opts_b;
  opts_b.base_frame = opts_a.base_frame + opts_a.window_frames;
  AddressSpace a(0, opts_a);
  AddressSpace b(1, opts_b);
  std::unordered_set<std::uint64_t> frames;
  for (int i = 0; i < 500; ++i) {
    const VirtualAddress va{static_cast<std::uint64_t>(i) << 12};
    CHECK(frames.insert(a.map_page(va).ppn).second);
    CHECK(frames.insert(b.map_page(va).ppn).second);
  }
}

TEST_CASE("superpage frames are aligned and disjoint from 4K frames") {
  AddressSpace aspace(0);
  aspace.map_page(VirtualAddress{0x1000});
  const auto big = aspace.map_page(VirtualAddress{0x40000000},
                                   PageSize::Page2M);
  aspace.map_page(VirtualAddress{0x2000});
  // The 2MB frame covers 512 4KB frames; none of them may be handed out
  // again. Compare byte ranges of everything allocated so far.
  const std::uint64_t big_lo = big.ppn << 21;
  const std::uint64_t big_hi = big_lo + (2ull << 20);
  for (std::uint64_t va : {0x1000ull, 0x2000ull}) {
    const std::uint64_t pa = aspace.translate(VirtualAddress{va});
    CHECK((pa < big_lo || pa >= big_hi));
  }
  CHECK(big_lo % (2ull << 20) == 0);
}
