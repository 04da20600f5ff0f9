#include "mmusim/workload.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "mmusim/errors.hpp"

namespace mmusim {

bool operator==(const Event& a, const Event& b) {
  if (a.type != b.type) return false;
  if (a.type == Event::Type::Switch)
    return a.tid == b.tid && a.asid == b.asid;
  return a.tid == b.tid && a.kind == b.kind && a.rw == b.rw && a.va == b.va;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
      ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_u64(std::string_view s, int base, const char* what) {
  if (s.empty()) throw ParseError(std::string("empty ") + what);
  if (base == 16 && s.size() > 2 && s[0] == '0' &&
      (s[1] == 'x' || s[1] == 'X'))
    s.remove_prefix(2);
  std::uint64_t value = 0;
  for (char c : s) {
    int digit;
    if (c >= '0' && c <= '9')
      digit = c - '0';
    else if (base == 16 && c >= 'a' && c <= 'f')
      digit = c - 'a' + 10;
    else if (base == 16 && c >= 'A' && c <= 'F')
      digit = c - 'A' + 10;
    else
      throw ParseError(std::string("bad ") + what + ": '" + std::string(s) +
                       "'");
    value = value * base + static_cast<std::uint64_t>(digit);
  }
  return value;
}

}  // namespace

std::optional<Event> parse_trace_line(std::string_view line) {
  const std::string_view body = trim(line);
  if (body.empty() || body.front() == '#') return std::nullopt;

  const auto fields = split_fields(body);
  if (fields[0] == "A") {
    if (fields.size() != 5)
      throw ParseError("access event needs 5 fields: A <tid> <I|D> <R|W> "
                       "<hex-va>");
    const std::uint64_t tid = parse_u64(fields[1], 10, "tid");
    AccessKind kind;
    if (fields[2] == "I")
      kind = AccessKind::Instruction;
    else if (fields[2] == "D")
      kind = AccessKind::Data;
    else
      throw ParseError("bad access kind: '" + std::string(fields[2]) +
                       "' (want I or D)");
    AccessType rw;
    if (fields[3] == "R")
      rw = AccessType::Read;
    else if (fields[3] == "W")
      rw = AccessType::Write;
    else
      throw ParseError("bad access type: '" + std::string(fields[3]) +
                       "' (want R or W)");
    const std::uint64_t va = parse_u64(fields[4], 16, "virtual address");
    return Event::access(static_cast<std::uint32_t>(tid), kind, rw, va);
  }
  if (fields[0] == "S") {
    if (fields.size() != 3)
      throw ParseError("switch event needs 3 fields: S <tid> <asid>");
    const std::uint64_t tid = parse_u64(fields[1], 10, "tid");
    const std::uint64_t asid = parse_u64(fields[2], 10, "asid");
    return Event::context_switch(static_cast<std::uint32_t>(tid),
                                 static_cast<Asid>(asid));
  }
  throw ParseError("unknown event tag: '" + std::string(fields[0]) + "'");
}

std::string format_event(const Event& e) {
  char buf[64];
  if (e.type == Event::Type::Switch) {
    std::snprintf(buf, sizeof(buf), "S %u %u", e.tid, e.asid);
  } else {
    std::snprintf(buf, sizeof(buf), "A %u %c %c %llx", e.tid,
                  e.kind == AccessKind::Instruction ? 'I' : 'D',
                  e.rw == AccessType::Read ? 'R' : 'W',
                  static_cast<unsigned long long>(e.va));
  }
  return buf;
}

std::optional<Event> TraceReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    try {
      if (auto event = parse_trace_line(line)) return event;
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " at line " +
                           std::to_string(line_),
                       line_);
    }
  }
  return std::nullopt;
}

std::vector<Event> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file: " + path);
  TraceReader reader(in);
  std::vector<Event> events;
  while (auto e = reader.next()) events.push_back(*e);
  return events;
}

SynthGenerator::SynthGenerator(SynthConfig cfg)
    : cfg_(cfg), rng_(cfg.seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull) {
  num_pages_ = std::max<std::uint64_t>(1, cfg_.footprint_bytes / 4096);
  code_pages_ = std::min<std::uint64_t>(8, num_pages_);
  if (cfg_.page_locality == PageLocality::Zipf) {
    if (cfg_.zipf_s <= 0.0)
      throw std::invalid_argument("SynthConfig: zipf s must be > 0");
    zipf_cdf_.resize(num_pages_);
    double total = 0.0;
    for (std::uint64_t k = 0; k < num_pages_; ++k) {
      total += 1.0 / std::pow(static_cast<double>(k + 1), cfg_.zipf_s);
      zipf_cdf_[k] = total;
    }
    for (double& c : zipf_cdf_) c /= total;
  }
  if (cfg_.threads == 0) cfg_.threads = 1;
}

std::uint64_t SynthGenerator::pick_page() {
  if (cfg_.page_locality == PageLocality::Uniform)
    return rng_.next_below(num_pages_);
  const double u = rng_.next_double();
  const auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
  return static_cast<std::uint64_t>(it - zipf_cdf_.begin());
}

Event SynthGenerator::next() {
  if (cfg_.switch_period > 0 && since_switch_ >= cfg_.switch_period) {
    since_switch_ = 0;
    const std::uint32_t tid = next_tid_;
    const std::uint32_t spaces = std::max<std::uint32_t>(2, cfg_.threads);
    const Asid asid = static_cast<Asid>(++switch_count_ % spaces);
    return Event::context_switch(tid, asid);
  }
  ++since_switch_;

  const std::uint32_t tid = next_tid_;
  next_tid_ = (next_tid_ + 1) % cfg_.threads;

  if (cfg_.inst_ratio > 0.0 && rng_.next_bool(cfg_.inst_ratio)) {
    // Code streams sequentially through the leading pages of the footprint.
    const std::uint64_t va =
        cfg_.base_va + (code_cursor_ % (code_pages_ * 4096));
    code_cursor_ += 64;
    return Event::access(tid, AccessKind::Instruction, AccessType::Read, va);
  }

  const std::uint64_t page = pick_page();
  std::uint64_t offset;
  if (cfg_.intra_page == IntraPage::Sequential) {
    offset = (seq_cursor_ * 64) % 4096;
    ++seq_cursor_;
  } else {
    offset = rng_.next_below(4096) & ~std::uint64_t{7};
  }
  const AccessType rw = rng_.next_bool(cfg_.write_ratio) ? AccessType::Write
                                                         : AccessType::Read;
  return Event::access(tid, AccessKind::Data, rw,
                       cfg_.base_va + page * 4096 + offset);
}

}  // namespace mmusim
