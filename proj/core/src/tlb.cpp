#include "mmusim/tlb.hpp"

#include <stdexcept>

namespace mmusim {

std::uint64_t tlb_reach_bytes(const TlbConfig& cfg) {
  return static_cast<std::uint64_t>(cfg.entries) * page_bytes(cfg.page_size);
}

std::uint64_t tlb_reach_bytes(std::initializer_list<TlbConfig> cfgs) {
  std::uint64_t total = 0;
  for (const TlbConfig& cfg : cfgs) total += tlb_reach_bytes(cfg);
  return total;
}

const char* tlb_hit_level_name(TlbHitLevel l) {
  switch (l) {
    case TlbHitLevel::L1: return "L1";
    case TlbHitLevel::Super: return "SUPER";
    case TlbHitLevel::L2: return "L2";
    case TlbHitLevel::Miss: return "MISS";
  }
  return "?";
}

Tlb::Tlb(TlbConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.entries == 0)
    throw std::invalid_argument("Tlb '" + cfg_.name + "': zero entries");
  if (cfg_.associativity == 0) {
    num_sets_ = 1;
    ways_ = cfg_.entries;
  } else {
    if (cfg_.entries % cfg_.associativity != 0)
      throw std::invalid_argument("Tlb '" + cfg_.name +
                                  "': entries not divisible by associativity");
    num_sets_ = cfg_.entries / cfg_.associativity;
    if ((num_sets_ & (num_sets_ - 1)) != 0)
      throw std::invalid_argument("Tlb '" + cfg_.name +
                                  "': set count must be a power of two");
    ways_ = cfg_.associativity;
  }
  sets_.resize(num_sets_);
}

std::optional<TlbEntry> Tlb::lookup(Asid asid, std::uint64_t vpn) {
  ++lookups_;
  auto it = index_.find(key_of(asid, vpn));
  if (it == index_.end()) return std::nullopt;
  ++hits_;
  EntryList& set = sets_[set_of(vpn)];
  it->second->lru_stamp = ++stamp_;
  set.splice(set.begin(), set, it->second);  // move to MRU
  return *it->second;
}

bool Tlb::contains(Asid asid, std::uint64_t vpn) const {
  return index_.count(key_of(asid, vpn)) != 0;
}

std::optional<TlbEntry> Tlb::insert(Asid asid, std::uint64_t vpn,
                                    std::uint64_t ppn) {
  EntryList& set = sets_[set_of(vpn)];
  auto it = index_.find(key_of(asid, vpn));
  if (it != index_.end()) {
    // Refresh in place.
    it->second->ppn = ppn;
    it->second->lru_stamp = ++stamp_;
    set.splice(set.begin(), set, it->second);
    return std::nullopt;
  }
  std::optional<TlbEntry> victim;
  if (set.size() >= ways_) {
    victim = set.back();
    index_.erase(key_of(victim->asid, victim->vpn));
    set.pop_back();
  }
  set.push_front(TlbEntry{asid, vpn, ppn, cfg_.page_size, ++stamp_});
  index_[key_of(asid, vpn)] = set.begin();
  return victim;
}

std::size_t Tlb::flush_asid(Asid asid) {
  std::size_t removed = 0;
  for (EntryList& set : sets_) {
    for (auto it = set.begin(); it != set.end();) {
      if (it->asid == asid) {
        index_.erase(key_of(it->asid, it->vpn));
        it = set.erase(it);
        ++removed;
      } else {
        ++it;
      }
    }
  }
  return removed;
}

std::size_t Tlb::flush_all() {
  const std::size_t removed = index_.size();
  index_.clear();
  for (EntryList& set : sets_) set.clear();
  return removed;
}

TlbHierarchy::TlbHierarchy(TlbHierarchyConfig cfg)
    : cfg_(std::move(cfg)),
      l1i_(cfg_.l1i),
      l1d_(cfg_.l1d),
      l2_(cfg_.l2),
      super_(cfg_.superpage) {}

TlbLookupResult TlbHierarchy::lookup(Asid asid, VirtualAddress va,
                                     AccessKind kind) {
  if (kind == AccessKind::Ptw)
    throw std::invalid_argument("TlbHierarchy::lookup: ptw has no TLB side");
  Tlb& l1 = (kind == AccessKind::Instruction) ? l1i_ : l1d_;

  // L1 and superpage TLB are probed in parallel; both update recency.
  auto l1_hit = l1.lookup(asid, va.vpn(l1.config().page_size));
  std::optional<TlbEntry> super_hit;
  if (cfg_.superpage_enabled)
    super_hit = super_.lookup(asid, va.vpn(super_.config().page_size));

  if (l1_hit) return {TlbHitLevel::L1, l1_hit->ppn, l1_hit->size, 0};
  if (super_hit)
    return {TlbHitLevel::Super, super_hit->ppn, super_hit->size, 0};

  auto l2_hit = l2_.lookup(asid, va.vpn(l2_.config().page_size));
  if (l2_hit) {
    // Promote into the missing L1.
    l1.insert(asid, l2_hit->vpn, l2_hit->ppn);
    return {TlbHitLevel::L2, l2_hit->ppn, l2_hit->size, cfg_.l2_hit_penalty};
  }
  return {};
}

std::vector<TlbEntry> TlbHierarchy::insert(Asid asid, VirtualAddress va,
                                           std::uint64_t ppn, PageSize size,
                                           AccessKind kind) {
  std::vector<TlbEntry> victims;
  auto take = [&victims](std::optional<TlbEntry> v) {
    if (v) victims.push_back(*v);
  };
  if (size == PageSize::Page4K) {
    Tlb& l1 = (kind == AccessKind::Instruction) ? l1i_ : l1d_;
    take(l1.insert(asid, va.vpn(PageSize::Page4K), ppn));
    take(l2_.insert(asid, va.vpn(PageSize::Page4K), ppn));
  } else if (cfg_.superpage_enabled && size == super_.config().page_size) {
    take(super_.insert(asid, va.vpn(size), ppn));
  }
  // Superpage translations with no matching structure are not cached; the
  // next reference walks again.
  return victims;
}

std::size_t TlbHierarchy::flush(FlushScope scope, Asid asid) {
  if (scope == FlushScope::All) {
    return l1i_.flush_all() + l1d_.flush_all() + l2_.flush_all() +
           super_.flush_all();
  }
  return l1i_.flush_asid(asid) + l1d_.flush_asid(asid) +
         l2_.flush_asid(asid) + super_.flush_asid(asid);
}

}  // namespace mmusim
