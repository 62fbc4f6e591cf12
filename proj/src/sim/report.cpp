#include "gnnsim/sim/report.hpp"

#include "json.hpp"

namespace gnnsim::sim {

ModuleCounters& CycleReport::module(const std::string& name) {
  for (auto& [n, c] : modules) {
    if (n == name) return c;
  }
  modules.emplace_back(name, ModuleCounters{});
  return modules.back().second;
}

const ModuleCounters* CycleReport::find_module(const std::string& name) const {
  for (const auto& [n, c] : modules) {
    if (n == name) return &c;
  }
  return nullptr;
}

std::string CycleReport::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["total_kernel_cycles"] = total_kernel_cycles;
  j["lower_bound_cycles"] = lower_bound_cycles;
  auto mods = nlohmann::ordered_json::array();
  for (const auto& [name, c] : modules) {
    mods.push_back({{"module", name},
                    {"active", c.active},
                    {"bubble", c.bubble},
                    {"idle", c.idle},
                    {"total", c.total}});
  }
  j["modules"] = std::move(mods);
  auto fifos_j = nlohmann::ordered_json::array();
  for (const auto& [name, f] : fifos) {
    fifos_j.push_back(
        {{"fifo", name}, {"capacity", f.capacity}, {"max_occupancy", f.max_occupancy}});
  }
  j["fifos"] = std::move(fifos_j);
  j["layer_input_nnz"] = layer_input_nnz;
  j["layer_input_elems"] = layer_input_elems;
  j["ft_products"] = ft_products;
  j["ft_busy_cycles"] = ft_busy_cycles;
  j["ft_bound_cycles"] = ft_bound_cycles;
  j["dispatch_conflicts"] = dispatch_conflicts;
  j["raw_violations"] = raw_violations;
  return j.dump(indent);
}

std::string CycleReport::to_csv() const {
  std::string out = "module,active,bubble,idle\n";
  ModuleCounters sum;
  for (const auto& [name, c] : modules) {
    out += name + ',' + std::to_string(c.active) + ',' + std::to_string(c.bubble) + ',' +
           std::to_string(c.idle) + '\n';
    sum.active += c.active;
    sum.bubble += c.bubble;
    sum.idle += c.idle;
  }
  out += "total," + std::to_string(sum.active) + ',' + std::to_string(sum.bubble) + ',' +
         std::to_string(sum.idle) + '\n';
  return out;
}

}  // namespace gnnsim::sim
