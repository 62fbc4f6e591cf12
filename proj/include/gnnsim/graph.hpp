#pragma once
// Undirected labeled graphs and the normalized adjacency used by the GCN
// layers. Normalization follows A' = D^-1/2 (A + I) D^-1/2 with D the degree
// matrix of A + I; A' is kept as a weighted directed edge list (both
// directions of every undirected edge plus one self loop per node), which is
// the form the aggregation hardware consumes.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace gnnsim {

using NodeIndex = std::uint32_t;

// Marks pipeline bubbles in edge streams. Never a valid node id.
inline constexpr NodeIndex kNodeSentinel = std::numeric_limits<NodeIndex>::max();

struct Graph {
  std::uint32_t num_nodes = 0;
  std::vector<std::uint32_t> labels;                   // one per node
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;  // undirected, canonical src < dst

  // Throws std::runtime_error on out-of-range endpoints, self loops,
  // duplicate edges or label-count mismatch.
  void validate() const;
};

struct WeightedEdge {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double weight = 0.0;
};

struct NormalizedGraph {
  std::uint32_t num_nodes = 0;
  std::vector<WeightedEdge> edges;  // 2|E| + |V| entries
};

// Row-major dense feature matrix, double precision (golden-model domain).
struct FeatureMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> data;

  double& at(std::uint32_t r, std::uint32_t c) { return data[std::size_t{r} * cols + c]; }
  double at(std::uint32_t r, std::uint32_t c) const { return data[std::size_t{r} * cols + c]; }
  static FeatureMatrix zeros(std::uint32_t rows, std::uint32_t cols) {
    return FeatureMatrix{rows, cols, std::vector<double>(std::size_t{rows} * cols, 0.0)};
  }
};

Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

// num_edges is clamped to the n*(n-1)/2 maximum; edges are distinct, no self
// loops. Same seed, same graph, on any platform.
Graph generate_synthetic(std::uint64_t seed, std::uint32_t num_nodes, std::uint32_t num_edges,
                         std::uint32_t vocab_size);

// |V| x vocab one-hot rows from node labels. Throws if a label >= vocab.
FeatureMatrix one_hot_features(const Graph& g, std::uint32_t vocab_size);

// Self loops get weight 1/(deg+1); edge (i,j) gets 1/sqrt((deg_i+1)(deg_j+1))
// in both directions. Entry order: both directions per canonical edge, then
// self loops by node id.
NormalizedGraph normalize_adjacency(const Graph& g);

}  // namespace gnnsim
