#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmusim/rng.hpp"
#include "mmusim/types.hpp"

namespace mmusim {

// One trace event: a memory access or a context switch rebinding a
// thread to an address space.
struct Event {
  enum class Type : std::uint8_t { Access, Switch };

  Type type = Type::Access;
  std::uint32_t tid = 0;
  AccessKind kind = AccessKind::Data;  // Access only
  AccessType rw = AccessType::Read;    // Access only
  std::uint64_t va = 0;                // Access only
  Asid asid = 0;                       // Switch only

  static Event access(std::uint32_t tid, AccessKind kind, AccessType rw,
                      std::uint64_t va) {
    return Event{Type::Access, tid, kind, rw, va, 0};
  }
  static Event context_switch(std::uint32_t tid, Asid asid) {
    return Event{Type::Switch, tid, AccessKind::Data, AccessType::Read, 0,
                 asid};
  }
};

bool operator==(const Event& a, const Event& b);

// Grammar, one event per ASCII line:
//   A <tid> <I|D> <R|W> <hex-va>
//   S <tid> <asid>
// '#' starts a comment line; blank lines are ignored. Returns nullopt for
// comment/blank lines and throws ParseError on malformed input.
std::optional<Event> parse_trace_line(std::string_view line);

// Canonical form of an event (lower-case bare hex, single spaces).
std::string format_event(const Event& e);

// Pull parser over a stream; attaches 1-based line numbers to errors.
class TraceReader {
 public:
  explicit TraceReader(std::istream& in) : in_(in) {}

  std::optional<Event> next();
  std::uint64_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::uint64_t line_ = 0;
};

std::vector<Event> read_trace_file(const std::string& path);

enum class PageLocality : std::uint8_t { Uniform, Zipf };
enum class IntraPage : std::uint8_t { Sequential, Random };

struct SynthConfig {
  std::uint64_t seed = 1;
  std::uint64_t footprint_bytes = 16ull << 20;
  PageLocality page_locality = PageLocality::Uniform;
  double zipf_s = 1.0;
  IntraPage intra_page = IntraPage::Random;
  double inst_ratio = 0.0;      // fraction of instruction fetches
  double write_ratio = 0.25;    // fraction of data accesses that write
  std::uint64_t switch_period = 0;  // accesses between Switch events; 0 = off
  std::uint32_t threads = 1;
  std::uint64_t base_va = 0x7f0000000000ull;
  bool superpage = false;  // engine maps the footprint with 2MB leaves
};

// Deterministic event stream with controlled footprint and locality.
// Instruction fetches stream sequentially through the first pages of the
// footprint so the instruction side stays well-behaved, like real code.
class SynthGenerator {
 public:
  explicit SynthGenerator(SynthConfig cfg);

  const SynthConfig& config() const { return cfg_; }
  Event next();

 private:
  std::uint64_t pick_page();

  SynthConfig cfg_;
  Rng rng_;
  std::uint64_t num_pages_;
  std::uint64_t code_pages_;
  std::vector<double> zipf_cdf_;
  std::uint64_t seq_cursor_ = 0;
  std::uint64_t code_cursor_ = 0;
  std::uint64_t since_switch_ = 0;
  std::uint64_t switch_count_ = 0;
  std::uint32_t next_tid_ = 0;
};

}  // namespace mmusim
