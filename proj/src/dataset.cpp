#include "gnnsim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "gnnsim/rng.hpp"

namespace gnnsim {

std::vector<Graph> generate_dataset(const DatasetSpec& spec) {
  std::vector<Graph> graphs;
  graphs.reserve(spec.count);
  Rng rng(spec.seed);
  for (std::uint32_t i = 0; i < spec.count; ++i) {
    const double gn = rng.gaussian();
    const double ge = rng.gaussian();
    const std::int64_t n0 = std::llround(spec.node_mean + gn * spec.node_mean / 8.0);
    const std::uint32_t n = static_cast<std::uint32_t>(std::max<std::int64_t>(2, n0));
    const std::uint64_t max_edges = std::uint64_t{n} * (n - 1) / 2;
    const std::int64_t m0 = std::llround(spec.edge_mean + ge * spec.edge_mean / 8.0);
    const std::uint64_t m = static_cast<std::uint64_t>(
        std::clamp<std::int64_t>(m0, 1, static_cast<std::int64_t>(max_edges)));
    graphs.push_back(generate_synthetic(rng.next_u64(), n, static_cast<std::uint32_t>(m),
                                        spec.vocab));
  }
  return graphs;
}

namespace {

std::string graph_file_name(std::uint32_t i) {
  std::ostringstream os;
  os << "graph_" << std::setw(4) << std::setfill('0') << i << ".json";
  return os.str();
}

}  // namespace

void write_dataset(const std::vector<Graph>& graphs, const DatasetSpec& spec,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::ordered_json index;
  index["version"] = 1;
  index["seed"] = spec.seed;
  index["count"] = graphs.size();
  index["node_mean"] = spec.node_mean;
  index["edge_mean"] = spec.edge_mean;
  index["vocab"] = spec.vocab;
  auto files = nlohmann::ordered_json::array();
  for (std::uint32_t i = 0; i < graphs.size(); ++i) {
    const std::string name = graph_file_name(i);
    save_graph(graphs[i], (fs::path(dir) / name).string());
    files.push_back(name);
  }
  index["files"] = std::move(files);
  std::ofstream out(fs::path(dir) / "index.json");
  if (!out) throw std::runtime_error("cannot write dataset index in " + dir);
  out << index.dump(2) << '\n';
}

std::vector<Graph> load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path index_path = fs::path(dir) / "index.json";
  std::ifstream in(index_path);
  if (!in) throw std::runtime_error("cannot open " + index_path.string());
  nlohmann::json index;
  try {
    in >> index;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad dataset index " + index_path.string() + ": " + e.what());
  }
  std::vector<Graph> graphs;
  for (const auto& name : index.at("files")) {
    graphs.push_back(load_graph((fs::path(dir) / name.get<std::string>()).string()));
  }
  return graphs;
}

}  // namespace gnnsim
