#include "gnnsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "gnnsim/rng.hpp"
#include "json.hpp"

namespace gnnsim {

void Graph::validate() const {
  if (labels.size() != num_nodes) {
    throw std::runtime_error("graph validation error: expected " + std::to_string(num_nodes) +
                             " labels, got " + std::to_string(labels.size()));
  }
  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const auto& [s, d] : edges) {
    if (s >= num_nodes || d >= num_nodes) {
      throw std::runtime_error("graph validation error: edge endpoint out of range");
    }
    if (s == d) {
      throw std::runtime_error("graph validation error: self loop on node " + std::to_string(s));
    }
    auto canon = std::minmax(s, d);
    if (!seen.insert({canon.first, canon.second}).second) {
      throw std::runtime_error("graph validation error: duplicate edge");
    }
  }
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("graph parse error in " + path + ": " + e.what());
  }
  Graph g;
  try {
    g.num_nodes = j.at("num_nodes").get<std::uint32_t>();
    g.labels = j.at("labels").get<std::vector<std::uint32_t>>();
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw std::runtime_error("graph parse error: edge entries must be [src, dst]");
      }
      g.edges.emplace_back(e[0].get<NodeIndex>(), e[1].get<NodeIndex>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("graph parse error in " + path + ": " + e.what());
  }
  g.validate();
  return g;
}

void save_graph(const Graph& g, const std::string& path) {
  g.validate();
  auto edges = g.edges;
  for (auto& [s, d] : edges) {
    if (s > d) std::swap(s, d);
  }
  std::sort(edges.begin(), edges.end());
  nlohmann::ordered_json j;
  j["num_nodes"] = g.num_nodes;
  j["labels"] = g.labels;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [s, d] : edges) arr.push_back({s, d});
  j["edges"] = std::move(arr);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  out << j.dump(2) << '\n';
}

Graph generate_synthetic(std::uint64_t seed, std::uint32_t num_nodes, std::uint32_t num_edges,
                         std::uint32_t vocab_size) {
  if (num_nodes == 0) throw std::runtime_error("generate_synthetic: num_nodes must be > 0");
  if (vocab_size == 0) throw std::runtime_error("generate_synthetic: vocab_size must be > 0");
  Rng rng(seed);
  Graph g;
  g.num_nodes = num_nodes;
  g.labels.reserve(num_nodes);
  for (std::uint32_t i = 0; i < num_nodes; ++i) {
    g.labels.push_back(static_cast<std::uint32_t>(rng.uniform_u64(vocab_size)));
  }
  const std::uint64_t max_edges = std::uint64_t{num_nodes} * (num_nodes - 1) / 2;
  const std::uint64_t want = std::min<std::uint64_t>(num_edges, max_edges);
  std::set<std::pair<NodeIndex, NodeIndex>> chosen;
  while (chosen.size() < want) {
    auto a = static_cast<NodeIndex>(rng.uniform_u64(num_nodes));
    auto b = static_cast<NodeIndex>(rng.uniform_u64(num_nodes));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    chosen.insert({a, b});
  }
  g.edges.assign(chosen.begin(), chosen.end());
  return g;
}

FeatureMatrix one_hot_features(const Graph& g, std::uint32_t vocab_size) {
  auto h = FeatureMatrix::zeros(g.num_nodes, vocab_size);
  for (std::uint32_t i = 0; i < g.num_nodes; ++i) {
    if (g.labels[i] >= vocab_size) {
      throw std::runtime_error("label " + std::to_string(g.labels[i]) +
                               " out of range for vocab size " + std::to_string(vocab_size));
    }
    h.at(i, g.labels[i]) = 1.0;
  }
  return h;
}

NormalizedGraph normalize_adjacency(const Graph& g) {
  g.validate();
  std::vector<std::uint32_t> deg(g.num_nodes, 0);
  for (const auto& [s, d] : g.edges) {
    ++deg[s];
    ++deg[d];
  }
  std::vector<double> inv_sqrt(g.num_nodes);
  for (std::uint32_t i = 0; i < g.num_nodes; ++i) {
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(deg[i]) + 1.0);
  }
  auto edges = g.edges;
  for (auto& [s, d] : edges) {
    if (s > d) std::swap(s, d);
  }
  std::sort(edges.begin(), edges.end());
  NormalizedGraph n;
  n.num_nodes = g.num_nodes;
  n.edges.reserve(2 * edges.size() + g.num_nodes);
  for (const auto& [s, d] : edges) {
    const double w = inv_sqrt[s] * inv_sqrt[d];
    n.edges.push_back({s, d, w});
    n.edges.push_back({d, s, w});
  }
  for (std::uint32_t i = 0; i < g.num_nodes; ++i) {
    n.edges.push_back({i, i, inv_sqrt[i] * inv_sqrt[i]});
  }
  return n;
}

}  // namespace gnnsim
