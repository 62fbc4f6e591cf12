#pragma once
// Architecture configuration for the cycle-approximate accelerator model.
// Three operating modes:
//   baseline             one shared module set, layers time multiplexed,
//                        intermediate features round-trip through off-chip
//                        memory at a per-element cycle cost
//   inter_layer_pipeline per-layer module instances connected by FIFOs,
//                        dense feature transform
//   extended_sparsity    adds the pruning units, per-layer FIFO groups and
//                        the bank-aware arbiter in front of each MULT

#include <array>
#include <cstdint>
#include <string>

namespace gnnsim::sim {

enum class ArchMode { baseline, inter_layer_pipeline, extended_sparsity };

const char* mode_name(ArchMode m);
ArchMode mode_from_name(const std::string& s);

struct LayerParams {
  std::uint32_t simd_ft = 16;   // MACs per PE in the feature transform
  std::uint32_t simd_agg = 32;  // adder width in the aggregation step
  std::uint32_t df = 8;         // PE count (node-dimension parallelism)
  std::uint32_t p = 8;          // input FIFO channels in front of the arbiter
};

struct ArchConfig {
  ArchMode mode = ArchMode::baseline;
  std::array<LayerParams, 3> layers;
  std::uint32_t lat_mult = 4;          // multiplier pipeline latency
  std::uint32_t lat_acc = 7;           // accumulator latency; the RAW window L
  std::uint32_t fifo_depth = 16;
  std::uint32_t simd_att = 16;         // attention / NTN / FCN stage width
  std::uint32_t lat_act = 8;           // tanh and sigmoid unit latency
  std::uint32_t mem_cost_per_elem = 2; // baseline inter-layer round trip, cycles/element
  std::uint64_t invocation_overhead = 0;  // host-side launch cost, cycles per kernel call

  // Throws on df > p, zero fields, or non-identical layer entries in
  // baseline mode.
  void validate() const;
};

ArchConfig load_arch_config(const std::string& path);
void save_arch_config(const ArchConfig& c, const std::string& path);

}  // namespace gnnsim::sim
