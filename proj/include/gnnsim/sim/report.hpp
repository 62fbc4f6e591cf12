#pragma once
// Cycle accounting for one simulated query. Every module's cycles are split
// into active (doing work), bubble (inserted stalls: RAW gaps, edge-stream
// bubbles) and idle; active + bubble + idle == total for each module.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gnnsim::sim {

struct ModuleCounters {
  std::uint64_t active = 0;
  std::uint64_t bubble = 0;
  std::uint64_t idle = 0;
  std::uint64_t total = 0;
};

struct FifoStat {
  std::uint32_t capacity = 0;
  std::uint32_t max_occupancy = 0;
};

struct CycleReport {
  std::uint64_t total_kernel_cycles = 0;
  std::uint64_t lower_bound_cycles = 0;
  std::vector<std::pair<std::string, ModuleCounters>> modules;
  std::vector<std::pair<std::string, FifoStat>> fifos;

  // Summed over both query graphs, indexed by GCN layer.
  std::array<std::uint64_t, 3> layer_input_nnz{};
  std::array<std::uint64_t, 3> layer_input_elems{};
  std::array<std::uint64_t, 3> ft_products{};
  std::array<std::uint64_t, 3> ft_busy_cycles{};   // active + bubble of the MULT path
  std::array<std::uint64_t, 3> ft_bound_cycles{};
  std::uint64_t dispatch_conflicts = 0;  // issue slots filled below df by bank conflicts
  std::uint64_t raw_violations = 0;      // stall-soundness failures; must stay 0

  ModuleCounters& module(const std::string& name);
  const ModuleCounters* find_module(const std::string& name) const;

  std::string to_json(int indent = 2) const;
  // One "module,active,bubble,idle" line per module plus a totals row.
  std::string to_csv() const;
};

}  // namespace gnnsim::sim
