#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <vector>

#include "doctest.h"
#include "gnnsim/dataset.hpp"
#include "gnnsim/graph.hpp"
#include "gnnsim/rng.hpp"

using namespace gnnsim;

namespace {

// Dense reference: D^{-1/2} (A + I) D^{-1/2} with D = deg + 1.
std::vector<double> dense_normalized(const Graph& g) {
  const std::uint32_t n = g.num_nodes;
  std::vector<double> a(std::size_t{n} * n, 0.0);
  std::vector<double> deg(n, 0.0);
  for (const auto& [s, d] : g.edges) {
    a[std::size_t{s} * n + d] = 1.0;
    a[std::size_t{d} * n + s] = 1.0;
    deg[s] += 1.0;
    deg[d] += 1.0;
  }
  for (std::uint32_t i = 0; i < n; ++i) a[std::size_t{i} * n + i] = 1.0;
  std::vector<double> out(std::size_t{n} * n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      out[std::size_t{i} * n + j] =
          a[std::size_t{i} * n + j] / std::sqrt((deg[i] + 1.0) * (deg[j] + 1.0));
    }
  }
  return out;
}

Graph random_graph(Rng& rng, std::uint32_t max_nodes, std::uint32_t vocab) {
  const auto n = static_cast<std::uint32_t>(2 + rng.uniform_u64(max_nodes - 1));
  const std::uint64_t max_e = std::uint64_t{n} * (n - 1) / 2;
  const auto m = static_cast<std::uint32_t>(1 + rng.uniform_u64(max_e));
  return generate_synthetic(rng.next_u64(), n, m, vocab);
}

}  // namespace

TEST_SUITE_BEGIN("graph");

TEST_CASE("validate rejects malformed graphs") {
  Graph g;
  g.num_nodes = 3;
  g.labels = {0, 1, 2};
  g.edges = {{0, 1}};
  CHECK_NOTHROW(g.validate());

  Graph bad = g;
  bad.labels.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);

  bad = g;
  bad.edges.push_back({1, 1});
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);

  bad = g;
  bad.edges.push_back({0, 1});
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);

  bad = g;
  bad.edges.push_back({0, 5});
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
}

TEST_CASE("save/load round trip") {
  const Graph g = generate_synthetic(11, 9, 14, 29);
  const auto p = std::filesystem::temp_directory_path() / "gnnsim_graph_rt.json";
  save_graph(g, p.string());
  const Graph r = load_graph(p.string());
  CHECK(r.num_nodes == g.num_nodes);
  CHECK(r.labels == g.labels);
  CHECK(r.edges == g.edges);
  std::filesystem::remove(p);
}

TEST_CASE("generator honors counts and ranges") {
  Rng rng(5);
  for (int it = 0; it < 50; ++it) {
    const auto n = static_cast<std::uint32_t>(2 + rng.uniform_u64(15));
    const std::uint64_t max_e = std::uint64_t{n} * (n - 1) / 2;
    const auto m = static_cast<std::uint32_t>(rng.uniform_u64(max_e + 1));
    const Graph g = generate_synthetic(rng.next_u64(), n, m, 29);
    CHECK(g.num_nodes == n);
    CHECK(g.edges.size() == std::min<std::uint64_t>(m, max_e));
    CHECK_NOTHROW(g.validate());
    for (auto l : g.labels) CHECK(l < 29);
  }
  CHECK(generate_synthetic(3, 7, 5, 29).edges ==
        generate_synthetic(3, 7, 5, 29).edges);  // deterministic
}

TEST_CASE("one-hot features") {
  const Graph g = generate_synthetic(2, 6, 7, 13);
  const FeatureMatrix h = one_hot_features(g, 13);
  CHECK(h.rows == 6);
  CHECK(h.cols == 13);
  for (std::uint32_t r = 0; r < h.rows; ++r) {
    double sum = 0.0;
    for (std::uint32_t c = 0; c < h.cols; ++c) sum += h.at(r, c);
    CHECK(sum == 1.0);
    CHECK(h.at(r, g.labels[r]) == 1.0);
  }
  CHECK_THROWS_AS(one_hot_features(g, 2), std::runtime_error);  // label out of vocab
}

TEST_CASE("normalization matches the dense oracle on 1000 graphs") {
  Rng rng(101);
  for (int it = 0; it < 1000; ++it) {
    const Graph g = random_graph(rng, 12, 8);
    const NormalizedGraph norm = normalize_adjacency(g);
    CHECK(norm.edges.size() == 2 * g.edges.size() + g.num_nodes);

    const std::uint32_t n = g.num_nodes;
    std::vector<double> dense(std::size_t{n} * n, 0.0);
    for (const auto& e : norm.edges) dense[std::size_t{e.src} * n + e.dst] += e.weight;
    const std::vector<double> ref = dense_normalized(g);
    double max_err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) max_err = std::max(max_err, std::abs(dense[i] - ref[i]));
    REQUIRE(max_err <= 1e-12);
  }
}

TEST_CASE("normalized weights are exactly symmetric") {
  Rng rng(202);
  for (int it = 0; it < 1000; ++it) {
    const Graph g = random_graph(rng, 12, 8);
    const NormalizedGraph norm = normalize_adjacency(g);
    std::map<std::pair<NodeIndex, NodeIndex>, double> w;
    for (const auto& e : norm.edges) w[{e.src, e.dst}] = e.weight;
    for (const auto& e : norm.edges) {
      auto it2 = w.find({e.dst, e.src});
      REQUIRE(it2 != w.end());
      REQUIRE(it2->second == e.weight);  // bitwise, not approximate
    }
  }
}

TEST_CASE("dataset generation: means, determinism, empty") {
  DatasetSpec spec;
  spec.seed = 9;
  spec.count = 1000;
  const std::vector<Graph> graphs = generate_dataset(spec);
  REQUIRE(graphs.size() == 1000);
  double nodes = 0.0, edges = 0.0;
  for (const Graph& g : graphs) {
    nodes += g.num_nodes;
    edges += static_cast<double>(g.edges.size());
  }
  nodes /= 1000.0;
  edges /= 1000.0;
  CHECK(std::abs(nodes - spec.node_mean) <= 0.2 * spec.node_mean);
  CHECK(std::abs(edges - spec.edge_mean) <= 0.2 * spec.edge_mean);

  const std::vector<Graph> again = generate_dataset(spec);
  REQUIRE(again.size() == graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    CHECK(again[i].labels == graphs[i].labels);
    CHECK(again[i].edges == graphs[i].edges);
  }

  spec.count = 0;
  CHECK(generate_dataset(spec).empty());
}

TEST_CASE("dataset write/load round trip") {
  DatasetSpec spec;
  spec.seed = 4;
  spec.count = 6;
  const auto dir = std::filesystem::temp_directory_path() / "gnnsim_ds_rt";
  std::filesystem::remove_all(dir);
  const std::vector<Graph> graphs = generate_dataset(spec);
  write_dataset(graphs, spec, dir.string());
  const std::vector<Graph> loaded = load_dataset(dir.string());
  REQUIRE(loaded.size() == graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    CHECK(loaded[i].num_nodes == graphs[i].num_nodes);
    CHECK(loaded[i].labels == graphs[i].labels);
    CHECK(loaded[i].edges == graphs[i].edges);
  }
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
