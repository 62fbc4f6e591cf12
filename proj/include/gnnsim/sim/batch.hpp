#pragma once
// Batched query processing: the accelerator's kernel cost is per query, the
// host-side invocation overhead is paid once per batch, so the amortized
// per-query cost falls with batch size. Queries are simulated in parallel
// across host threads; replicated module sets scale throughput, not the
// per-query cycle count, and are reported as-is.

#include <cstdint>
#include <utility>
#include <vector>

#include "gnnsim/graph.hpp"
#include "gnnsim/model.hpp"
#include "gnnsim/sim/arch_config.hpp"

namespace gnnsim::sim {

struct BatchPoint {
  std::uint32_t batch_size = 1;
  double avg_cycles_per_query = 0.0;  // invocation_overhead / b + mean kernel
  double speedup_vs_batch1 = 1.0;
};

struct BatchResult {
  std::vector<std::uint64_t> kernel_cycles;  // per query, input order
  double mean_kernel_cycles = 0.0;
  std::vector<BatchPoint> points;
  std::uint32_t replicas = 1;
};

BatchResult simulate_batch(const std::vector<std::pair<const Graph*, const Graph*>>& queries,
                           const SimGnnModel& model, const ArchConfig& cfg,
                           const std::vector<std::uint32_t>& batch_sizes,
                           std::uint32_t replicas = 1, std::uint32_t threads = 0);

}  // namespace gnnsim::sim
