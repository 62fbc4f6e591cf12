#include "gnnsim/sim/arch_config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gnnsim::sim {

const char* mode_name(ArchMode m) {
  switch (m) {
    case ArchMode::baseline:
      return "baseline";
    case ArchMode::inter_layer_pipeline:
      return "inter_layer_pipeline";
    case ArchMode::extended_sparsity:
      return "extended_sparsity";
  }
  return "?";
}

ArchMode mode_from_name(const std::string& s) {
  if (s == "baseline") return ArchMode::baseline;
  if (s == "inter_layer_pipeline") return ArchMode::inter_layer_pipeline;
  if (s == "extended_sparsity") return ArchMode::extended_sparsity;
  throw std::runtime_error("config validation error: unknown mode '" + s + "'");
}

void ArchConfig::validate() const {
  auto bad = [](const std::string& what) {
    throw std::runtime_error("config validation error: " + what);
  };
  for (const auto& l : layers) {
    if (l.simd_ft == 0 || l.simd_agg == 0 || l.df == 0 || l.p == 0) {
      bad("layer parameters must be >= 1");
    }
    if (l.df > l.p) bad("df must not exceed p");
  }
  if (lat_mult == 0 || lat_acc == 0 || lat_act == 0) bad("unit latencies must be >= 1");
  if (fifo_depth < 2) bad("fifo_depth must be >= 2");
  if (simd_att == 0) bad("simd_att must be >= 1");
  if (mode == ArchMode::baseline) {
    for (int l = 1; l < 3; ++l) {
      const auto& a = layers[0];
      const auto& b = layers[l];
      if (a.simd_ft != b.simd_ft || a.simd_agg != b.simd_agg || a.df != b.df || a.p != b.p) {
        bad("baseline mode shares one module set; layer entries must be identical");
      }
    }
  }
}

ArchConfig load_arch_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  try {
    ArchConfig c;
    c.mode = mode_from_name(j.at("mode").get<std::string>());
    const auto& layers = j.at("layers");
    if (layers.size() != 3) throw std::runtime_error("config validation error: need 3 layer entries");
    for (int l = 0; l < 3; ++l) {
      c.layers[l].simd_ft = layers[l].at("simd_ft").get<std::uint32_t>();
      c.layers[l].simd_agg = layers[l].at("simd_agg").get<std::uint32_t>();
      c.layers[l].df = layers[l].at("df").get<std::uint32_t>();
      c.layers[l].p = layers[l].value("p", c.layers[l].df);
    }
    c.lat_mult = j.value("lat_mult", 4u);
    c.lat_acc = j.value("lat_acc", 7u);
    c.fifo_depth = j.value("fifo_depth", 16u);
    c.simd_att = j.value("simd_att", 16u);
    c.lat_act = j.value("lat_act", 8u);
    c.mem_cost_per_elem = j.value("mem_cost_per_elem", 2u);
    c.invocation_overhead = j.value("invocation_overhead", std::uint64_t{0});
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
}

void save_arch_config(const ArchConfig& c, const std::string& path) {
  c.validate();
  nlohmann::ordered_json j;
  j["mode"] = mode_name(c.mode);
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : c.layers) {
    layers.push_back(
        {{"simd_ft", l.simd_ft}, {"simd_agg", l.simd_agg}, {"df", l.df}, {"p", l.p}});
  }
  j["layers"] = std::move(layers);
  j["lat_mult"] = c.lat_mult;
  j["lat_acc"] = c.lat_acc;
  j["fifo_depth"] = c.fifo_depth;
  j["simd_att"] = c.simd_att;
  j["lat_act"] = c.lat_act;
  j["mem_cost_per_elem"] = c.mem_cost_per_elem;
  j["invocation_overhead"] = c.invocation_overhead;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace gnnsim::sim
