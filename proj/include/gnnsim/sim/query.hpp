#pragma once
// One similarity query on the accelerator model: both graphs run through the
// GCN stage engine, the attention / NTN / FCN stages are priced with closed
// cycle formulas (their dataflow has no contention to model) and the float
// datapath produces the score the golden model is checked against.

#include <array>
#include <cstdint>
#include <vector>

#include "gnnsim/graph.hpp"
#include "gnnsim/model.hpp"
#include "gnnsim/sim/arch_config.hpp"
#include "gnnsim/sim/report.hpp"

namespace gnnsim::sim {

// Model parameters converted to the float datapath once per run.
struct ModelF32 {
  std::array<std::uint32_t, 4> dims{};
  std::uint32_t k = 0;
  std::array<std::vector<float>, 3> gcn_w;  // f_in x f_out
  std::array<std::vector<float>, 3> gcn_b;
  std::vector<float> att;    // F x F
  std::vector<float> ntn_w;  // k slices of F x F
  std::vector<float> ntn_v;  // k x 2F
  std::vector<float> ntn_b;  // k
  struct Fc {
    std::uint32_t in = 0;
    std::uint32_t out = 0;
    std::vector<float> w;  // out x in
    std::vector<float> b;
  };
  std::vector<Fc> fcn;

  const float* ntn_slice(std::uint32_t s) const {
    return ntn_w.data() + std::size_t{s} * dims[3] * dims[3];
  }
  static ModelF32 from(const SimGnnModel& m);
};

struct AttOutcome {
  std::vector<float> pooled;          // F, float attention-pooled embedding
  std::uint64_t stream_cycles = 0;    // MAC pass over the streamed elements
  std::uint64_t tail_cycles = 0;      // context build + scoring + weighted sum
};

// stream_elems = number of layer-3 output elements the stage consumes (the
// pruned count in sparse mode, |V| * F dense).
AttOutcome simulate_att(const float* h, std::uint32_t rows, std::uint32_t f,
                        std::uint64_t stream_elems, const ModelF32& m, const ArchConfig& cfg);

struct NtnFcnOutcome {
  double score = 0.0;
  std::uint64_t cycles = 0;
};

NtnFcnOutcome simulate_ntn_fcn(const std::vector<float>& hg1, const std::vector<float>& hg2,
                               const ModelF32& m, const ArchConfig& cfg);

struct QueryResult {
  double score = 0.0;  // float-datapath similarity score
  CycleReport report;
};

QueryResult simulate_query(const Graph& g1, const Graph& g2, const SimGnnModel& model,
                           const ArchConfig& cfg);

}  // namespace gnnsim::sim
