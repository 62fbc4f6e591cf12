#pragma once
// Double-precision reference pipeline: GCN stack -> attention pooling ->
// neural tensor network -> fully connected scoring head. Scores land in
// (0, 1); higher means more similar. This is the oracle the cycle simulator
// is validated against.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gnnsim/graph.hpp"
#include "gnnsim/model.hpp"

namespace gnnsim {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ReLU(A' (H W) + b). The aggregation walks the normalized edge list rather
// than materializing A'; tests compare against a dense materialization.
FeatureMatrix gcn_layer(const NormalizedGraph& n, const FeatureMatrix& h,
                        const GcnLayerWeights& lw);

struct StackStats {
  // Input to layers 1..3: nonzero count and total element count.
  std::array<std::uint64_t, 3> input_nnz{};
  std::array<std::uint64_t, 3> input_elems{};
};

FeatureMatrix gcn_stack(const NormalizedGraph& n, const FeatureMatrix& h0, const SimGnnModel& m,
                        StackStats* stats = nullptr);

// c = tanh((1/|V|) W_att sum_n h_n); a_n = sigmoid(h_n . c); returns
// sum_n a_n h_n.
std::vector<double> attention_pool(const FeatureMatrix& h, const std::vector<double>& w_att);

// K-vector: s_k = sigmoid(hg1^T W_k hg2 + V_k . [hg1; hg2] + b_k).
std::vector<double> ntn_scores(const SimGnnModel& m, const std::vector<double>& hg1,
                               const std::vector<double>& hg2);

// ReLU between hidden layers, sigmoid on the final scalar.
double fcn_score(const SimGnnModel& m, const std::vector<double>& ntn);

double simgnn_score(const Graph& a, const Graph& b, const SimGnnModel& m);

}  // namespace gnnsim
