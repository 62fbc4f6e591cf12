#pragma once
// Synthetic graph corpora: node and edge counts drawn around configurable
// means (defaults match small molecule graphs: ~25.6 nodes, ~27.6 edges,
// 29 labels), written to a directory with an index file so runs are
// reproducible from the seed alone.

#include <cstdint>
#include <string>
#include <vector>

#include "gnnsim/graph.hpp"

namespace gnnsim {

struct DatasetSpec {
  std::uint64_t seed = 7;
  std::uint32_t count = 200;
  double node_mean = 25.6;
  double edge_mean = 27.6;
  std::uint32_t vocab = 29;
};

// The fixed corpus used by the regression and acceptance runs: 100 query
// pairs (200 graphs) from seed 7 with the default size distribution.
inline DatasetSpec standard_workload_spec() { return DatasetSpec{}; }

std::vector<Graph> generate_dataset(const DatasetSpec& spec);

// Writes graph_NNNN.json files plus index.json into dir (created if needed).
void write_dataset(const std::vector<Graph>& graphs, const DatasetSpec& spec,
                   const std::string& dir);

// Loads the graphs listed in dir/index.json, in index order.
std::vector<Graph> load_dataset(const std::string& dir);

}  // namespace gnnsim
