#pragma once
// Offline transforms that make the graph consumable by the accelerator:
// reordering the aggregation edge stream so same-destination updates sit at
// least L positions apart (L = accumulator latency), padding row counts for
// the dense feature-transform schedule, and packing nonzero feature elements
// with their addresses for the sparse path.

#include <cstdint>
#include <string>
#include <vector>

#include "gnnsim/graph.hpp"

namespace gnnsim {

// One nonzero feature element with its location. The simulator datapath is
// float; packing converts from the double-precision matrix by value cast.
struct AddressedValue {
  float value = 0.0f;
  NodeIndex row = 0;
  std::uint32_t col = 0;
};

struct EdgeStreamEntry {
  NodeIndex src = kNodeSentinel;  // kNodeSentinel marks a bubble
  NodeIndex dst = kNodeSentinel;
  float weight = 0.0f;

  bool is_bubble() const { return src == kNodeSentinel; }
};

struct EdgeStream {
  std::vector<EdgeStreamEntry> entries;
  std::uint32_t min_gap = 1;  // the L this stream was built for
};

// Greedy schedule: at each position pick the eligible destination with the
// most remaining edges (ties by smallest id); emit a bubble when nothing is
// eligible. Eligible = last emission for that destination at least l
// positions back.
EdgeStream reorder_edges(const NormalizedGraph& n, std::uint32_t l);

// True iff the non-bubble entries are exactly the normalized edge multiset
// and every same-destination pair is >= l positions apart. On failure an
// explanation is written to *why when provided.
bool verify_edge_stream(const EdgeStream& s, const NormalizedGraph& n, std::uint32_t l,
                        std::string* why = nullptr);

// Smallest row count >= rows that is a multiple of df and makes the dense
// schedule's same-row revisit distance (rows'/df) * ceil(f_out/simd) reach l.
std::uint32_t pad_rows(std::uint32_t rows, std::uint32_t df, std::uint32_t f_out,
                       std::uint32_t simd, std::uint32_t l);

// Nonzeros of h in column-major order with addresses. Scatter-adding the
// packed values reproduces float(h) exactly.
std::vector<AddressedValue> prune_pack(const FeatureMatrix& h);

}  // namespace gnnsim
