#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mmusim/engine.hpp"
#include "mmusim/workload.hpp"

namespace mmusim {

struct WorkloadConfig {
  std::string trace_path;  // empty = synthetic
  SynthConfig synth;

  bool uses_trace() const { return !trace_path.empty(); }
};

struct SweepConfig {
  std::vector<std::uint64_t> l4_sizes = {64ull << 20, 128ull << 20,
                                         256ull << 20, 512ull << 20,
                                         1024ull << 20};
  std::vector<std::uint32_t> l4_blocks = {64, 512};
  std::vector<bool> ideal_modes = {false, true};
};

// One experiment: the machine, the workload feeding it, the cycle model
// and the sweep grid. Omitted keys keep the baseline machine defaults.
struct ExperimentConfig {
  MachineConfig machine;
  EngineConfig engine;
  WorkloadConfig workload;
  SweepConfig sweep;
};

ExperimentConfig default_config();

// Applies one `section.key = value` setting. Unknown keys and malformed
// values raise ConfigError naming the key.
void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value);

// Geometry and cross-key checks; raises ConfigError.
void validate_config(const ExperimentConfig& cfg);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical key/value echo; parse of the echo reproduces the config.
std::vector<std::pair<std::string, std::string>> to_key_values(
    const ExperimentConfig& cfg);

// Value helpers shared with the CLI.
std::uint64_t parse_size_value(const std::string& text);
bool parse_bool_value(const std::string& text);

}  // namespace mmusim
