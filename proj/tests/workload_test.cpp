#include <map>
#include <sstream>

#include "doctest.h"
#include "mmusim/errors.hpp"
#include "mmusim/workload.hpp"

using namespace mmusim;

TEST_CASE("parse_trace_line grammar") {
  auto e = parse_trace_line("A 2 D R 7f0012345678");
  REQUIRE(e.has_value());
  CHECK(e->type == Event::Type::Access);
  CHECK(e->tid == 2);
  CHECK(e->kind == AccessKind::Data);
  CHECK(e->rw == AccessType::Read);
  CHECK(e->va == 0x7f0012345678ull);

  e = parse_trace_line("S 1 7");
  REQUIRE(e.has_value());
  CHECK(e->type == Event::Type::Switch);
  CHECK(e->tid == 1);
  CHECK(e->asid == 7);

  CHECK_THROWS_AS(parse_trace_line("A 2 Q R 0"), ParseError);
  CHECK_THROWS_AS(parse_trace_line("A 2 D X 0"), ParseError);
  CHECK_THROWS_AS(parse_trace_line("A 2 D R"), ParseError);
  CHECK_THROWS_AS(parse_trace_line("Z 1 2"), ParseError);
  CHECK_THROWS_AS(parse_trace_line("A x D R 0"), ParseError);
}

TEST_CASE("whitespace and comments are tolerated") {
  CHECK_FALSE(parse_trace_line("").has_value());
  CHECK_FALSE(parse_trace_line("   ").has_value());
  CHECK_FALSE(parse_trace_line("# comment").has_value());
  CHECK_FALSE(parse_trace_line("  # indented comment").has_value());
  const auto e = parse_trace_line("  A 0 I R 0x400000  ");
  REQUIRE(e.has_value());
  CHECK(e->kind == AccessKind::Instruction);
  CHECK(e->va == 0x400000);
}

TEST_CASE("format(parse(line)) canonicalizes valid lines") {
  const char* lines[] = {"A 2 D R 7f0012345678", "S 1 7", "A 0 I W abc",
                         "  A 3 D W 0xABC  "};
  const char* canon[] = {"A 2 D R 7f0012345678", "S 1 7", "A 0 I W abc",
                         "A 3 D W abc"};
  for (unsigned i = 0; i < 4; ++i) {
    const auto e = parse_trace_line(lines[i]);
    REQUIRE(e.has_value());
    CHECK(format_event(*e) == canon[i]);
    // Round-trip: parsing the canonical form reproduces the event.
    const auto again = parse_trace_line(format_event(*e));
    REQUIRE(again.has_value());
    CHECK(*again == *e);
  }
}

TEST_CASE("reader reports 1-based line numbers") {
  std::istringstream in("# header\nA 0 D R 1000\n\nbogus line\n");
  TraceReader reader(in);
  CHECK(reader.next().has_value());
  try {
    reader.next();
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line_number == 4);
  }
}

TEST_CASE("synthetic stream is deterministic under its seed") {
  SynthConfig cfg;
  cfg.seed = 99;
  cfg.footprint_bytes = 1 << 20;
  cfg.inst_ratio = 0.3;
  cfg.switch_period = 100;
  cfg.threads = 4;
  SynthGenerator a(cfg);
  SynthGenerator b(cfg);
  for (int i = 0; i < 20000; ++i) CHECK(a.next() == b.next());

  SynthConfig reseeded = cfg;
  reseeded.seed = 100;
  SynthGenerator c(cfg);
  SynthGenerator d(reseeded);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    if (!(c.next() == d.next())) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("generated footprint never exceeds the configured bytes") {
  SynthConfig cfg;
  cfg.footprint_bytes = 1 << 20;
  cfg.inst_ratio = 0.2;
  cfg.page_locality = PageLocality::Zipf;
  cfg.zipf_s = 1.0;
  SynthGenerator gen(cfg);
  for (int i = 0; i < 1000000; ++i) {
    const Event e = gen.next();
    if (e.type != Event::Type::Access) continue;
    REQUIRE(e.va >= cfg.base_va);
    REQUIRE(e.va < cfg.base_va + cfg.footprint_bytes);
  }
}

TEST_CASE("zipf focuses mass on the hottest page") {
  SynthConfig cfg;
  cfg.footprint_bytes = 1024 * 4096;
  cfg.page_locality = PageLocality::Zipf;
  cfg.zipf_s = 1.0;
  SynthGenerator gen(cfg);
  std::map<std::uint64_t, std::uint64_t> counts;
  for (int i = 0; i < 200000; ++i) {
    const Event e = gen.next();
    counts[(e.va - cfg.base_va) / 4096]++;
  }
  std::vector<std::uint64_t> freq;
  freq.reserve(counts.size());
  std::uint64_t max_count = 0;
  for (const auto& [page, count] : counts) {
    freq.push_back(count);
    max_count = std::max(max_count, count);
  }
  std::sort(freq.begin(), freq.end());
  const std::uint64_t median = freq[freq.size() / 2];
  CHECK(max_count > median);

  // Uniform, by contrast, stays flat.
  SynthConfig uni = cfg;
  uni.page_locality = PageLocality::Uniform;
  SynthGenerator ugen(uni);
  std::map<std::uint64_t, std::uint64_t> ucounts;
  for (int i = 0; i < 200000; ++i)
    ucounts[(ugen.next().va - cfg.base_va) / 4096]++;
  std::uint64_t umax = 0;
  for (const auto& [page, count] : ucounts) umax = std::max(umax, count);
  CHECK(umax < max_count / 4);
}

TEST_CASE("switch events appear exactly every switch_period accesses") {
  SynthConfig cfg;
  cfg.switch_period = 50;
  cfg.threads = 3;
  SynthGenerator gen(cfg);
  int accesses_since = 0;
  int switches = 0;
  for (int i = 0; i < 10000; ++i) {
    const Event e = gen.next();
    if (e.type == Event::Type::Switch) {
      CHECK(accesses_since == 50);
      accesses_since = 0;
      ++switches;
    } else {
      ++accesses_since;
    }
  }
  CHECK(switches == 10000 / 51);
}

TEST_CASE("instruction ratio controls the event mix") {
  SynthConfig cfg;
  cfg.inst_ratio = 0.5;
  cfg.seed = 5;
  SynthGenerator gen(cfg);
  int inst = 0;
  const int total = 100000;
  for (int i = 0; i < total; ++i)
    if (gen.next().kind == AccessKind::Instruction) ++inst;
  CHECK(inst > total * 0.45);
  CHECK(inst < total * 0.55);

  cfg.inst_ratio = 0.0;
  SynthGenerator none(cfg);
  for (int i = 0; i < 10000; ++i)
    CHECK(none.next().kind == AccessKind::Data);
}

TEST_CASE("sequential intra-page strides through 64B blocks") {
  SynthConfig cfg;
  cfg.footprint_bytes = 4096;  // one page: offsets are fully determined
  cfg.intra_page = IntraPage::Sequential;
  SynthGenerator gen(cfg);
  std::uint64_t expect = 0;
  for (int i = 0; i < 256; ++i) {
    const Event e = gen.next();
    CHECK((e.va - cfg.base_va) == expect);
    expect = (expect + 64) % 4096;
  }
}
