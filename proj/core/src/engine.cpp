#include "mmusim/engine.hpp"

#include "mmusim/errors.hpp"

namespace mmusim {

namespace {
// Disjoint physical windows per address space so distinct ASIDs (and the
// nested dimension) never share frames.
constexpr std::uint64_t kWindowFrames = std::uint64_t{1} << 24;
constexpr std::uint64_t kBaseFrame = 256;
constexpr std::uint64_t kPteLineBytes = 64;
}  // namespace

Engine::Engine(MachineConfig machine, EngineConfig engine)
    : machine_(std::move(machine)),
      cfg_(engine),
      tlb_(machine_.tlb),
      caches_(machine_.caches),
      walker_(machine_.pwc, machine_.nested) {}

AddressSpace& Engine::space(Asid asid) {
  auto it = spaces_.find(asid);
  if (it == spaces_.end()) {
    FrameAllocOptions opts;
    opts.base_frame = kBaseFrame + kWindowFrames * next_window_++;
    opts.window_frames = kWindowFrames;
    opts.shuffle_seed = cfg_.frame_shuffle_seed == 0
                            ? 0
                            : cfg_.frame_shuffle_seed + asid;
    it = spaces_.emplace(asid, std::make_unique<AddressSpace>(asid, opts))
             .first;
  }
  return *it->second;
}

void Engine::ensure_mapped(AddressSpace& aspace, VirtualAddress va) {
  if (machine_.nested.enabled) {
    auto git = guest_spaces_.find(aspace.asid());
    if (git == guest_spaces_.end()) {
      FrameAllocOptions opts;
      opts.base_frame = kBaseFrame + kWindowFrames * next_window_++;
      opts.window_frames = kWindowFrames;
      git = guest_spaces_
                .emplace(aspace.asid(),
                         std::make_unique<AddressSpace>(
                             aspace.asid(), opts, machine_.nested.guest_levels))
                .first;
    }
    if (!nested_space_) {
      FrameAllocOptions opts;
      opts.base_frame = kBaseFrame + kWindowFrames * next_window_++;
      opts.window_frames = kWindowFrames;
      nested_space_ = std::make_unique<AddressSpace>(
          0xffff, opts, machine_.nested.nested_levels);
    }
    Walker::ensure_nested_mapped(*git->second, *nested_space_, va);
    return;
  }
  if (!aspace.is_mapped(va)) {
    aspace.map_page(va, cfg_.map_superpages ? PageSize::Page2M
                                            : PageSize::Page4K);
  }
}

std::uint64_t Engine::physical_address(Asid asid, VirtualAddress va) {
  if (machine_.nested.enabled) {
    const std::uint64_t gpa = guest_spaces_.at(asid)->translate(va);
    return nested_space_->translate(VirtualAddress{gpa});
  }
  return space(asid).translate(va);
}

void Engine::on_switch(const Event& event) {
  bindings_[event.tid] = event.asid;
  ++context_switches_;
  if (machine_.tlb.flush_on_switch) {
    tlb_.flush(FlushScope::All);
    walker_.pwc().flush();
  }
}

StepOutcome Engine::step(const Event& event) {
  ++events_;
  StepOutcome out;
  if (event.type == Event::Type::Switch) {
    on_switch(event);
    return out;
  }

  out.is_access = true;
  ++instructions_;
  const bool is_data = event.kind == AccessKind::Data;
  (is_data ? data_accesses_ : inst_accesses_)++;

  auto bound = bindings_.find(event.tid);
  const Asid asid = bound == bindings_.end() ? static_cast<Asid>(event.tid)
                                             : bound->second;
  const VirtualAddress va{event.va};
  AddressSpace& aspace = space(asid);
  ensure_mapped(aspace, va);

  // (1) TLB lookup. The ideal TLB always hits and responds within the
  // pipeline, like an L1 hit.
  if (cfg_.ideal_tlb) {
    out.tlb_hit = true;
    out.tlb.level = TlbHitLevel::L1;
  } else {
    out.tlb = tlb_.lookup(asid, va, event.kind);
    out.tlb_hit = out.tlb.hit();
  }
  (is_data ? data_tlb_lookups_ : inst_tlb_lookups_)++;
  if (out.tlb_hit) (is_data ? data_tlb_hits_ : inst_tlb_hits_)++;

  // (2) Walk on a full miss, then install the end-to-end translation.
  if (!out.tlb_hit) {
    WalkResult wr =
        machine_.nested.enabled
            ? walker_.nested_walk(*guest_spaces_.at(asid), *nested_space_, va,
                                  caches_)
            : walker_.walk(aspace, va, caches_);
    tlb_.insert(asid, va, wr.ppn, wr.size, event.kind);

    ++walk_count_;
    const std::uint64_t recorded =
        wr.latency_cycles +
        (cfg_.walk_l2tlb_penalty ? machine_.tlb.l2_hit_penalty : 0);
    hist_.record(recorded);
    walk_cycles_ += recorded;
    for (const WalkRef& ref : wr.refs) {
      const unsigned row = kMaxWalkLevels - static_cast<unsigned>(ref.level);
      locality_[row][static_cast<unsigned>(ref.service)]++;
      pte_lines_[row].insert(ref.pte_addr / kPteLineBytes);
      ++walk_ref_total_;
    }
    out.walk = std::move(wr);
  }

  // (3) Translate, (4) access the referenced line.
  const std::uint64_t paddr = physical_address(asid, va);
  out.cache = caches_.access(paddr, event.kind, event.rw);

  // (5) Classify and accumulate.
  if (is_data) {
    const bool cache_hit = out.cache.service != MemLevel::Mem;
    const InterplayCase c =
        cache_hit ? (out.tlb_hit ? InterplayCase::HitHit
                                 : InterplayCase::HitMiss)
                  : (out.tlb_hit ? InterplayCase::MissHit
                                 : InterplayCase::MissMiss);
    out.interplay = c;
    interplay_[static_cast<unsigned>(c)]++;
    if (out.cache.service == MemLevel::L4) {
      ++l4_data_hits_;
      if (!out.tlb_hit) ++l4_data_hits_tlb_miss_;
    }
    data_cycles_ += out.cache.cycles + out.tlb.penalty_cycles;
  }
  return out;
}

Report Engine::run(const std::function<std::optional<Event>()>& source) {
  for (std::uint64_t n = 0; n < cfg_.max_events; ++n) {
    auto event = source();
    if (!event) break;
    step(*event);
  }
  return report();
}

Report Engine::report() const {
  Report r;
  r.config_echo = config_echo_;
  r.events = events_;
  r.instructions = instructions_;
  r.data_accesses = data_accesses_;
  r.inst_accesses = inst_accesses_;
  r.context_switches = context_switches_;

  r.walk_count = walk_count_;
  r.walk_latency = hist_;
  r.locality_counts = locality_;
  for (unsigned l = 0; l < kMaxWalkLevels; ++l)
    r.distinct_pte_lines[l] = pte_lines_[l].size();

  r.tlb_stats = {
      {"l1i", tlb_.l1i().lookups(), tlb_.l1i().hits()},
      {"l1d", tlb_.l1d().lookups(), tlb_.l1d().hits()},
      {"super", tlb_.superpage().lookups(), tlb_.superpage().hits()},
      {"l2", tlb_.l2().lookups(), tlb_.l2().hits()},
  };
  r.data_tlb_lookups = data_tlb_lookups_;
  r.data_tlb_hits = data_tlb_hits_;
  r.inst_tlb_lookups = inst_tlb_lookups_;
  r.inst_tlb_hits = inst_tlb_hits_;
  r.ideal_tlb = cfg_.ideal_tlb;

  r.interplay = interplay_;
  r.l4_data_hits = l4_data_hits_;
  r.l4_data_hits_tlb_miss = l4_data_hits_tlb_miss_;
  r.l4_enabled = caches_.has_l4();
  r.caches = caches_.snapshot();

  r.base_cpi = cfg_.base_cpi;
  r.overlap = cfg_.overlap;
  r.data_cycles = data_cycles_;
  r.walk_cycles = walk_cycles_;
  r.est_cycles = static_cast<double>(instructions_) * cfg_.base_cpi +
                 static_cast<double>(data_cycles_) +
                 (1.0 - cfg_.overlap) * static_cast<double>(walk_cycles_);
  r.est_ipc = r.est_cycles == 0.0
                  ? 1.0 / cfg_.base_cpi
                  : static_cast<double>(instructions_) / r.est_cycles;

  // Self-checks; a violation here is an engine bug, not a config error.
  std::uint64_t interplay_sum = 0;
  for (auto c : r.interplay) interplay_sum += c;
  if (interplay_sum != data_accesses_)
    throw InternalError("engine: interplay cases do not partition data "
                        "accesses");
  if (r.walk_latency.total_count() != walk_count_)
    throw InternalError("engine: histogram mass != walk count");
  std::uint64_t locality_sum = 0;
  for (const auto& row : locality_)
    for (auto v : row) locality_sum += v;
  if (locality_sum != walk_ref_total_)
    throw InternalError("engine: locality counters lost references");
  if (!cfg_.ideal_tlb) {
    const std::uint64_t misses = (data_tlb_lookups_ - data_tlb_hits_) +
                                 (inst_tlb_lookups_ - inst_tlb_hits_);
    if (walk_count_ != misses)
      throw InternalError("engine: walk count != TLB hierarchy misses");
  } else if (walk_count_ != 0) {
    throw InternalError("engine: ideal TLB must not walk");
  }
  return r;
}

}  // namespace mmusim
