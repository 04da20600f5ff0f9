#include "mmusim/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmusim/errors.hpp"

namespace mmusim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(
                        static_cast<unsigned char>(c)));
  return s;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t value = std::stoull(v, &pos, 0);
    if (pos != v.size()) throw std::invalid_argument(v);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t parse_size(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double value;
  try {
    value = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a size, got '" + v + "'");
  }
  const std::string suffix = lower(trim(v.substr(pos)));
  std::uint64_t scale = 1;
  if (suffix == "" || suffix == "b")
    scale = 1;
  else if (suffix == "k" || suffix == "kb" || suffix == "kib")
    scale = 1ull << 10;
  else if (suffix == "m" || suffix == "mb" || suffix == "mib")
    scale = 1ull << 20;
  else if (suffix == "g" || suffix == "gb" || suffix == "gib")
    scale = 1ull << 30;
  else
    throw ConfigError(key + ": unknown size suffix '" + suffix + "'");
  return static_cast<std::uint64_t>(value * static_cast<double>(scale));
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

PageSize parse_page_size(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "4k" || s == "4kb" || s == "4kib") return PageSize::Page4K;
  if (s == "2m" || s == "2mb" || s == "2mib") return PageSize::Page2M;
  if (s == "1g" || s == "1gb" || s == "1gib") return PageSize::Page1G;
  throw ConfigError(key + ": expected 4K, 2M or 1G, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool handle_cache_key(CacheConfig& c, const std::string& field,
                      const std::string& key, const std::string& value) {
  if (field == "size") {
    c.size_bytes = parse_size(key, value);
  } else if (field == "assoc") {
    c.associativity = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (field == "block") {
    c.block_bytes = static_cast<std::uint32_t>(parse_size(key, value));
  } else if (field == "latency") {
    c.latency_cycles = static_cast<std::uint32_t>(parse_u64(key, value));
  } else {
    return false;
  }
  return true;
}

bool handle_tlb_key(TlbConfig& t, const std::string& field,
                    const std::string& key, const std::string& value) {
  if (field == "entries") {
    t.entries = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (field == "assoc") {
    t.associativity = static_cast<std::uint32_t>(parse_u64(key, value));
  } else {
    return false;
  }
  return true;
}

}  // namespace

std::uint64_t parse_size_value(const std::string& text) {
  return parse_size("value", text);
}

bool parse_bool_value(const std::string& text) {
  return parse_bool("value", text);
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

void apply_key(ExperimentConfig& cfg, const std::string& raw_key,
               const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.empty()) throw ConfigError("empty key");

  // section / rest-of-key
  const auto dot = key.find('.');
  const std::string section = key.substr(0, dot);
  const std::string rest = dot == std::string::npos ? "" : key.substr(dot + 1);

  if (section == "tlb") {
    const auto dot2 = rest.find('.');
    const std::string sub = rest.substr(0, dot2);
    const std::string field =
        dot2 == std::string::npos ? "" : rest.substr(dot2 + 1);
    if (sub == "l1i" && handle_tlb_key(cfg.machine.tlb.l1i, field, key, value))
      return;
    if (sub == "l1d" && handle_tlb_key(cfg.machine.tlb.l1d, field, key, value))
      return;
    if (sub == "l2") {
      if (handle_tlb_key(cfg.machine.tlb.l2, field, key, value)) return;
      if (field == "hit_penalty") {
        cfg.machine.tlb.l2_hit_penalty =
            static_cast<std::uint32_t>(parse_u64(key, value));
        return;
      }
    }
    if (sub == "super") {
      if (handle_tlb_key(cfg.machine.tlb.superpage, field, key, value)) return;
      if (field == "page_size") {
        cfg.machine.tlb.superpage.page_size = parse_page_size(key, value);
        return;
      }
      if (field == "enabled") {
        cfg.machine.tlb.superpage_enabled = parse_bool(key, value);
        return;
      }
    }
    if (sub == "policy" && field == "flush_on_switch") {
      cfg.machine.tlb.flush_on_switch = parse_bool(key, value);
      return;
    }
  } else if (section == "walker") {
    if (rest == "pwc.enabled") {
      cfg.machine.pwc.enabled = parse_bool(key, value);
      return;
    }
    if (rest == "pwc.entries") {
      const auto n = static_cast<std::uint32_t>(parse_u64(key, value));
      cfg.machine.pwc.entries_per_level = {n, n, n};
      return;
    }
    if (rest == "pwc.latency") {
      cfg.machine.pwc.latency_cycles =
          static_cast<std::uint32_t>(parse_u64(key, value));
      return;
    }
    if (rest == "walk_from_l2") {
      cfg.machine.caches.ptw_from_l2 = parse_bool(key, value);
      return;
    }
    if (rest == "pollution_off") {
      cfg.machine.caches.ptw_pollution_off = parse_bool(key, value);
      return;
    }
    if (rest == "nested.enabled") {
      cfg.machine.nested.enabled = parse_bool(key, value);
      return;
    }
    if (rest == "nested.levels") {
      const auto n = static_cast<unsigned>(parse_u64(key, value));
      if (n < 1 || n > 4)
        throw ConfigError(key + ": levels must be in [1,4]");
      cfg.machine.nested.guest_levels = n;
      cfg.machine.nested.nested_levels = n;
      return;
    }
  } else if (section == "cache") {
    const auto dot2 = rest.find('.');
    const std::string sub = rest.substr(0, dot2);
    const std::string field =
        dot2 == std::string::npos ? "" : rest.substr(dot2 + 1);
    CacheConfig* target = nullptr;
    if (sub == "l1i") target = &cfg.machine.caches.l1i;
    if (sub == "l1d") target = &cfg.machine.caches.l1d;
    if (sub == "l2") target = &cfg.machine.caches.l2;
    if (sub == "l3") target = &cfg.machine.caches.l3;
    if (target && handle_cache_key(*target, field, key, value)) return;
    if (sub == "l4") {
      if (field == "enabled") {
        if (parse_bool(key, value)) {
          if (!cfg.machine.caches.l4) cfg.machine.caches.l4 = configure_l4(
              256ull << 20, 64);
        } else {
          cfg.machine.caches.l4.reset();
        }
        return;
      }
      if (!cfg.machine.caches.l4)
        cfg.machine.caches.l4 = configure_l4(256ull << 20, 64);
      if (handle_cache_key(*cfg.machine.caches.l4, field, key, value)) return;
    }
  } else if (section == "mem") {
    if (rest == "latency_cycles") {
      cfg.machine.caches.mem_latency_cycles =
          static_cast<std::uint32_t>(parse_u64(key, value));
      return;
    }
  } else if (section == "engine") {
    if (rest == "max_events") {
      cfg.engine.max_events = parse_u64(key, value);
      return;
    }
    if (rest == "ideal_tlb") {
      cfg.engine.ideal_tlb = parse_bool(key, value);
      return;
    }
    if (rest == "base_cpi") {
      cfg.engine.base_cpi = parse_double(key, value);
      return;
    }
    if (rest == "overlap") {
      const double w = parse_double(key, value);
      if (w < 0.0 || w > 1.0)
        throw ConfigError(key + ": overlap must be in [0,1]");
      cfg.engine.overlap = w;
      return;
    }
    if (rest == "walk_l2tlb_penalty") {
      cfg.engine.walk_l2tlb_penalty = parse_bool(key, value);
      return;
    }
    if (rest == "frame_shuffle_seed") {
      cfg.engine.frame_shuffle_seed = parse_u64(key, value);
      return;
    }
  } else if (section == "workload") {
    if (rest == "trace") {
      cfg.workload.trace_path = value;
      return;
    }
  } else if (section == "synth") {
    SynthConfig& s = cfg.workload.synth;
    if (rest == "seed") {
      s.seed = parse_u64(key, value);
      return;
    }
    if (rest == "footprint") {
      s.footprint_bytes = parse_size(key, value);
      return;
    }
    if (rest == "page_locality") {
      const std::string v = lower(value);
      if (v == "uniform") {
        s.page_locality = PageLocality::Uniform;
      } else if (v == "zipf") {
        s.page_locality = PageLocality::Zipf;
      } else {
        throw ConfigError(key + ": expected uniform or zipf, got '" + value +
                          "'");
      }
      return;
    }
    if (rest == "zipf_s") {
      s.zipf_s = parse_double(key, value);
      if (s.zipf_s <= 0.0) throw ConfigError(key + ": zipf s must be > 0");
      return;
    }
    if (rest == "intra_page") {
      const std::string v = lower(value);
      if (v == "sequential") {
        s.intra_page = IntraPage::Sequential;
      } else if (v == "random") {
        s.intra_page = IntraPage::Random;
      } else {
        throw ConfigError(key + ": expected sequential or random, got '" +
                          value + "'");
      }
      return;
    }
    if (rest == "inst_ratio") {
      s.inst_ratio = parse_double(key, value);
      return;
    }
    if (rest == "write_ratio") {
      s.write_ratio = parse_double(key, value);
      return;
    }
    if (rest == "switch_period") {
      s.switch_period = parse_u64(key, value);
      return;
    }
    if (rest == "threads") {
      s.threads = static_cast<std::uint32_t>(parse_u64(key, value));
      return;
    }
    if (rest == "base_va") {
      s.base_va = parse_u64(key, value);
      return;
    }
    if (rest == "superpage") {
      s.superpage = parse_bool(key, value);
      cfg.engine.map_superpages = s.superpage;
      return;
    }
  } else if (section == "sweep") {
    if (rest == "l4.sizes") {
      cfg.sweep.l4_sizes.clear();
      for (const auto& item : split_list(value))
        cfg.sweep.l4_sizes.push_back(parse_size(key, item));
      return;
    }
    if (rest == "l4.blocks") {
      cfg.sweep.l4_blocks.clear();
      for (const auto& item : split_list(value))
        cfg.sweep.l4_blocks.push_back(
            static_cast<std::uint32_t>(parse_size(key, item)));
      return;
    }
    if (rest == "ideal") {
      cfg.sweep.ideal_modes.clear();
      for (const auto& item : split_list(value))
        cfg.sweep.ideal_modes.push_back(parse_bool(key, item));
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

void validate_config(const ExperimentConfig& cfg) {
  auto check = [](const CacheConfig& c, const std::string& key) {
    try {
      validate_geometry(c);
    } catch (const InvalidGeometry& e) {
      throw ConfigError(std::string("cache.") + key + ": " + e.what());
    }
  };
  check(cfg.machine.caches.l1i, "l1i");
  check(cfg.machine.caches.l1d, "l1d");
  check(cfg.machine.caches.l2, "l2");
  check(cfg.machine.caches.l3, "l3");
  if (cfg.machine.caches.l4) {
    check(*cfg.machine.caches.l4, "l4");
    if (cfg.machine.caches.l4->block_bytes != 64 &&
        cfg.machine.caches.l4->block_bytes != 512)
      throw ConfigError("cache.l4.block: must be 64 or 512");
  }
  for (const std::uint64_t size : cfg.sweep.l4_sizes) {
    for (const std::uint32_t block : cfg.sweep.l4_blocks) {
      try {
        configure_l4(size, block,
                     cfg.machine.caches.l4 ? cfg.machine.caches.l4
                                                   ->associativity
                                           : 16,
                     cfg.machine.caches.l4 ? cfg.machine.caches.l4
                                                   ->latency_cycles
                                           : 20);
      } catch (const InvalidGeometry& e) {
        throw ConfigError(std::string("sweep.l4: ") + e.what());
      }
    }
  }
  if (cfg.workload.synth.footprint_bytes < 4096)
    throw ConfigError("synth.footprint: must map at least one 4KB page");
  if (cfg.engine.map_superpages && cfg.engine.frame_shuffle_seed != 0)
    throw ConfigError(
        "synth.superpage: incompatible with engine.frame_shuffle_seed");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg = default_config();
  std::stringstream ss(text);
  std::string line;
  std::uint64_t line_no = 0;
  bool synth_keys_seen = false;
  bool trace_seen = false;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_key(cfg, key, value);
    if (key.rfind("synth.", 0) == 0) synth_keys_seen = true;
    if (key == "workload.trace" && !value.empty()) trace_seen = true;
  }
  if (trace_seen && synth_keys_seen)
    throw ConfigError(
        "workload.trace and synth.* are mutually exclusive; configure "
        "exactly one workload");
  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::pair<std::string, std::string>> to_key_values(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  auto add = [&kv](const std::string& k, const std::string& v) {
    kv.emplace_back(k, v);
  };
  auto add_tlb = [&](const std::string& name, const TlbConfig& t) {
    add("tlb." + name + ".entries", fmt_u64(t.entries));
    add("tlb." + name + ".assoc", fmt_u64(t.associativity));
  };
  add_tlb("l1i", cfg.machine.tlb.l1i);
  add_tlb("l1d", cfg.machine.tlb.l1d);
  add_tlb("l2", cfg.machine.tlb.l2);
  add("tlb.l2.hit_penalty", fmt_u64(cfg.machine.tlb.l2_hit_penalty));
  add_tlb("super", cfg.machine.tlb.superpage);
  add("tlb.super.page_size",
      page_size_name(cfg.machine.tlb.superpage.page_size));
  add("tlb.super.enabled", cfg.machine.tlb.superpage_enabled ? "1" : "0");
  add("tlb.policy.flush_on_switch",
      cfg.machine.tlb.flush_on_switch ? "1" : "0");

  add("walker.pwc.enabled", cfg.machine.pwc.enabled ? "1" : "0");
  add("walker.pwc.entries", fmt_u64(cfg.machine.pwc.entries_per_level[0]));
  add("walker.pwc.latency", fmt_u64(cfg.machine.pwc.latency_cycles));
  add("walker.walk_from_l2", cfg.machine.caches.ptw_from_l2 ? "1" : "0");
  add("walker.pollution_off",
      cfg.machine.caches.ptw_pollution_off ? "1" : "0");
  add("walker.nested.enabled", cfg.machine.nested.enabled ? "1" : "0");
  add("walker.nested.levels", fmt_u64(cfg.machine.nested.guest_levels));

  auto add_cache = [&](const std::string& name, const CacheConfig& c) {
    add("cache." + name + ".size", fmt_u64(c.size_bytes));
    add("cache." + name + ".assoc", fmt_u64(c.associativity));
    add("cache." + name + ".block", fmt_u64(c.block_bytes));
    add("cache." + name + ".latency", fmt_u64(c.latency_cycles));
  };
  add_cache("l1i", cfg.machine.caches.l1i);
  add_cache("l1d", cfg.machine.caches.l1d);
  add_cache("l2", cfg.machine.caches.l2);
  add_cache("l3", cfg.machine.caches.l3);
  add("cache.l4.enabled", cfg.machine.caches.l4 ? "1" : "0");
  if (cfg.machine.caches.l4) add_cache("l4", *cfg.machine.caches.l4);
  add("mem.latency_cycles", fmt_u64(cfg.machine.caches.mem_latency_cycles));

  add("engine.max_events", fmt_u64(cfg.engine.max_events));
  add("engine.ideal_tlb", cfg.engine.ideal_tlb ? "1" : "0");
  add("engine.base_cpi", fmt_double(cfg.engine.base_cpi));
  add("engine.overlap", fmt_double(cfg.engine.overlap));
  add("engine.walk_l2tlb_penalty",
      cfg.engine.walk_l2tlb_penalty ? "1" : "0");
  add("engine.frame_shuffle_seed", fmt_u64(cfg.engine.frame_shuffle_seed));

  if (cfg.workload.uses_trace()) {
    add("workload.trace", cfg.workload.trace_path);
  } else {
    const SynthConfig& s = cfg.workload.synth;
    add("synth.seed", fmt_u64(s.seed));
    add("synth.footprint", fmt_u64(s.footprint_bytes));
    add("synth.page_locality",
        s.page_locality == PageLocality::Uniform ? "uniform" : "zipf");
    add("synth.zipf_s", fmt_double(s.zipf_s));
    add("synth.intra_page",
        s.intra_page == IntraPage::Sequential ? "sequential" : "random");
    add("synth.inst_ratio", fmt_double(s.inst_ratio));
    add("synth.write_ratio", fmt_double(s.write_ratio));
    add("synth.switch_period", fmt_u64(s.switch_period));
    add("synth.threads", fmt_u64(s.threads));
    add("synth.base_va", fmt_u64(s.base_va));
    add("synth.superpage", s.superpage ? "1" : "0");
  }

  auto join = [](const auto& items, auto fmt) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ",";
      out += fmt(items[i]);
    }
    return out;
  };
  add("sweep.l4.sizes",
      join(cfg.sweep.l4_sizes, [](std::uint64_t v) { return fmt_u64(v); }));
  add("sweep.l4.blocks",
      join(cfg.sweep.l4_blocks, [](std::uint32_t v) { return fmt_u64(v); }));
  add("sweep.ideal",
      join(cfg.sweep.ideal_modes,
           [](bool v) { return std::string(v ? "1" : "0"); }));
  return kv;
}

}  // namespace mmusim
